#include "plateau/config.hpp"
#include "plateau/io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace plateau;

namespace {

ConfigError config_error(std::string_view text) {
    try {
        (void)build_config(parse_config_text(text, "run.toml"));
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("no ConfigError");
    return ConfigError("", "", 0, 0);
}

}  // namespace

TEST_CASE("config file parsing") {
    const auto raw = parse_config_text(
        "# run\n"
        "domain = \"star 1,0.3,5\"\n"
        "f = mean   # comment\n"
        "sigma = 0.7\n"
        "grid = [32, 48]\n"
        "schedule = 't=0,0.5,1;eps=0.04,0.02,0.01'\n"
        "seed = 9\n"
        "exec = serial\n",
        "run.toml");
    const auto c = build_config(raw);
    CHECK(c.domain == "star 1,0.3,5");
    CHECK(c.f == "mean");
    CHECK(c.sigma == 0.7);
    CHECK(c.n_r == 32);
    CHECK(c.n_phi == 48);
    CHECK(c.seed == 9);
    CHECK(c.exec == Exec::serial);
    const auto d = c.make_domain();
    const auto s = c.make_schedule(d, c.make_spec());
    CHECK(s.t_steps == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(s.epsilon_steps == std::vector<double>{0.04, 0.02, 0.01});
    CHECK(s.theta_steps.size() == 5);
    CHECK(raw.at("sigma").line == 4);
    CHECK(raw.at("sigma").column == 9);
}

TEST_CASE("a single grid size doubles for the angle") {
    const auto c = build_config(parse_config_text("grid = 32\n", "x"));
    CHECK(c.n_r == 32);
    CHECK(c.n_phi == 64);
}

TEST_CASE("config errors carry positions") {
    auto e = config_error("f = mean\nsigma = 1.5\n");
    CHECK(e.line() == 2);
    CHECK(e.column() == 9);
    CHECK(std::string(e.what()).find("sigma must lie in (0,1)") != std::string::npos);
    e = config_error("colour = red\n");
    CHECK(e.line() == 1);
    CHECK(std::string(e.what()).rfind("run.toml:1:", 0) == 0);
    e = config_error("sigma 0.5\n");
    CHECK(e.message() == "expected key = value");
    e = config_error("grid = 4,8\n");
    CHECK(e.line() == 1);
    e = config_error("f = median\n");
    CHECK(e.column() == 5);
    e = config_error("domain = \"disk 1\n");
    CHECK(e.message() == "unterminated string");
    e = config_error("schedule = \"t=0,1;warp=2\"\n");
    CHECK(e.line() == 1);
}

TEST_CASE("command line overrides") {
    auto raw = parse_config_text("sigma = 0.5\n", "run.toml");
    apply_override(raw, "--sigma=0.25", "<command line>", 10);
    CHECK(build_config(raw).sigma == 0.25);
    CHECK(raw.at("sigma").column == 18);
    apply_override(raw, "--sweep-sigma=[0.9,0.5]", "<command line>", 1);
    CHECK(build_config(raw).sweep_sigma == std::vector<double>{0.9, 0.5});
    CHECK_THROWS_AS(apply_override(raw, "--sigma", "<command line>", 1), ConfigError);
}

TEST_CASE("domain presets") {
    CHECK(parse_domain("disk 0.5", 16, 32).max_radius() == doctest::Approx(0.5));
    CHECK(parse_domain("ellipse 1,0.5", 16, 32).min_radius() == doctest::Approx(0.5));
    CHECK(parse_domain("star 1,0.3,5", 16, 32).max_radius() == doctest::Approx(1.3));
    CHECK(parse_domain("interval 0.8", 16, 0).dim == 1);
    CHECK(parse_domain("fourier 1,0.1;0.05", 16, 32).max_radius() > 1.0);
    CHECK_THROWS_AS(parse_domain("disk -1", 16, 32), std::invalid_argument);
    CHECK_THROWS_AS(parse_domain("star 1,0.3", 16, 32), std::invalid_argument);
    CHECK_THROWS_AS(parse_domain("blob 1", 16, 32), std::invalid_argument);
}

TEST_CASE("schedule strings") {
    const Domain d = Domain::disk(1.0, 16, 32);
    const auto base = ContinuationSchedule::defaults(d, CurvatureSpec::mean(2));
    const auto s = parse_schedule("theta=0.5,0;bisections=4", base);
    CHECK(s.theta_steps == std::vector<double>{0.5, 0.0});
    CHECK(s.max_bisections == 4);
    CHECK(s.t_steps == base.t_steps);
    CHECK_THROWS_AS(parse_schedule("theta", base), std::invalid_argument);
    CHECK_THROWS_AS(parse_schedule("t=0,0.5", base), std::invalid_argument);
    CHECK(parse_number_list("[1, 2.5,3]") == std::vector<double>{1.0, 2.5, 3.0});
}

TEST_CASE("solution table round trip") {
    for (const Domain& d : {Domain::star(1.0, 0.2, 3, 8, 16), Domain::interval(0.8, 8)}) {
        const auto topo = build_grid(d);
        std::vector<double> u(topo.node_count);
        for (int p = 0; p < topo.node_count; ++p) {
            u[p] = 0.05 + 0.3 * (1.2 - topo.position(p).squaredNorm()) / 3.0 + 1e-17 * p;
        }
        const auto text = solution_csv(topo, u, 0.5);
        CHECK(std::count(text.begin(), text.end(), '\n') == topo.node_count + 1);
        const auto back = read_solution_csv(text, topo.dim);
        CHECK(back == u);
        CHECK_THROWS_AS(read_solution_csv("x\n", topo.dim), std::runtime_error);
    }
}

TEST_CASE("report round trip") {
    RunConfig c;
    c.domain = "disk 0.5";
    SolveReport r;
    r.sigma = 0.5;
    r.solution.boundary_value = 0.01;
    r.theta_reached = 0.0;
    r.final_residual = 1e-11;
    r.converged = true;
    r.stages.push_back({"t", 0.25, 0.5, 0.04, 0.875, 3, 1, {1e-1, 1e-5, 1e-11}, true, ""});
    r.epsilon_levels.push_back({0.04, {0.1, 0.2 / 3.0}});
    const auto [c2, r2] = read_report_json(nlohmann::json::parse(report_json(c, r).dump()));
    CHECK(c2.domain == "disk 0.5");
    CHECK(c2.n_r == c.n_r);
    CHECK(r2.sigma == 0.5);
    CHECK(r2.solution.boundary_value == 0.01);
    CHECK(r2.stages.size() == 1);
    CHECK(r2.stages[0].residuals == r.stages[0].residuals);
    CHECK(r2.stages[0].halvings == 1);
    CHECK(r2.epsilon_levels[0].u == r.epsilon_levels[0].u);
}

TEST_CASE("scorecard json") {
    Scorecard card;
    card.add(compare("a", 1.0, Relation::less_equal, kInfinity, 0.0));
    card.add(measurement("b", std::nan("")));
    const auto j = scorecard_json(card);
    CHECK(j.at("pass").get<bool>());
    CHECK(j.at("entries").at(0).at("rhs").get<std::string>() == "inf");
    CHECK(j.at("entries").at(0).at("relation").get<std::string>() == "<=");
    CHECK(j.at("entries").at(1).at("lhs").get<std::string>() == "nan");
    CHECK_FALSE(j.at("entries").at(1).at("enforced").get<bool>());
}

TEST_CASE("atomic write replaces the file") {
    const auto dir = std::filesystem::temp_directory_path() / "plateau_io_test";
    std::filesystem::remove_all(dir);
    const auto path = dir / "a.txt";
    write_file_atomic(path, "one");
    write_file_atomic(path, "two");
    CHECK(read_file(path) == "two");
    int files = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) {
        ++files;
    }
    CHECK(files == 1);
    std::filesystem::remove_all(dir);
}
