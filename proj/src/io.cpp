#include "plateau/io.hpp"

#include "plateau/format.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace plateau {

using nlohmann::json;

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    std::filesystem::create_directories(dir);
    auto tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()));
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        os << content;
        os.flush();
        if (!os) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::string solution_csv_header(int dim) {
    std::string h = "r,phi";
    for (int k = 1; k <= dim; ++k) {
        h += ",x" + std::to_string(k);
    }
    h += ",u";
    for (int k = 1; k <= dim; ++k) {
        h += ",Du" + std::to_string(k);
    }
    for (int k = 1; k <= dim; ++k) {
        h += ",kappa" + std::to_string(k);
    }
    return h + ",nu,eta";
}

std::string solution_csv(const GridTopology& topo, std::span<const double> u, double sigma) {
    const auto geo = geometry_field(topo, u);
    std::string out = solution_csv_header(topo.dim) + "\n";
    for (int p = 0; p < topo.node_count; ++p) {
        const auto& g = geo[p];
        double r = 0.0;
        double phi = 0.0;
        if (topo.dim == 2) {
            r = topo.r[p];
            phi = topo.phi[p];
        } else {
            r = std::abs(g.x(0));
            phi = g.x(0) < 0.0 ? std::numbers::pi : 0.0;
        }
        out += shortest(r) + ',' + shortest(phi);
        for (int k = 0; k < topo.dim; ++k) {
            out += ',' + shortest(g.x(k));
        }
        out += ',' + shortest(g.u);
        for (int k = 0; k < topo.dim; ++k) {
            out += ',' + shortest(g.du(k));
        }
        for (int k = 0; k < topo.dim; ++k) {
            out += ',' + shortest(g.kappa(k));
        }
        out += ',' + shortest(g.nu) + ',' + shortest((sigma - g.nu) / g.u) + '\n';
    }
    return out;
}

std::vector<double> read_solution_csv(const std::string& text, int dim) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != solution_csv_header(dim)) {
        throw std::runtime_error("solution.csv: unexpected header");
    }
    const int u_col = 2 + dim;
    const int columns = 2 + 3 * dim + 3;
    std::vector<double> u;
    int row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) {
            continue;
        }
        int col = 0;
        std::size_t start = 0;
        double value = 0.0;
        while (true) {
            const auto end = line.find(',', start);
            if (col == u_col) {
                const auto field = std::string_view(line).substr(start, end == std::string::npos ? end : end - start);
                const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
                if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
                    throw std::runtime_error("solution.csv: bad u value on row " + std::to_string(row));
                }
            }
            ++col;
            if (end == std::string::npos) {
                break;
            }
            start = end + 1;
        }
        if (col != columns) {
            throw std::runtime_error("solution.csv: wrong column count on row " + std::to_string(row));
        }
        u.push_back(value);
    }
    return u;
}

json config_json(const RunConfig& c) {
    return json{{"domain", c.domain},
                {"f", c.f},
                {"sigma", c.sigma},
                {"grid", {c.n_r, c.n_phi}},
                {"schedule", c.schedule},
                {"seed", c.seed},
                {"exec", c.exec == Exec::serial ? "serial" : "openmp"}};
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    c.domain = j.at("domain").get<std::string>();
    c.f = j.at("f").get<std::string>();
    c.sigma = j.at("sigma").get<double>();
    c.n_r = j.at("grid").at(0).get<int>();
    c.n_phi = j.at("grid").at(1).get<int>();
    c.schedule = j.value("schedule", std::string{});
    c.seed = j.value("seed", std::uint64_t{1});
    c.exec = j.value("exec", std::string("openmp")) == "serial" ? Exec::serial : Exec::openmp;
    return c;
}

json report_json(const RunConfig& config, const SolveReport& r) {
    json stages = json::array();
    for (const auto& s : r.stages) {
        stages.push_back({{"ladder", s.ladder},
                          {"t", s.t},
                          {"theta", s.theta},
                          {"epsilon", s.epsilon},
                          {"sigma", s.sigma},
                          {"iterations", s.iterations},
                          {"halvings", s.halvings},
                          {"residuals", s.residuals},
                          {"converged", s.converged},
                          {"message", s.message}});
    }
    json levels = json::array();
    for (const auto& l : r.epsilon_levels) {
        levels.push_back({{"epsilon", l.epsilon}, {"u", l.u}});
    }
    return json{{"config", config_json(config)},
                {"sigma", r.sigma},
                {"epsilon", r.solution.boundary_value},
                {"theta_reached", r.theta_reached},
                {"final_residual", r.final_residual},
                {"bisections", r.bisections},
                {"converged", r.converged},
                {"failure", r.failure},
                {"stages", stages},
                {"epsilon_levels", levels}};
}

std::pair<RunConfig, SolveReport> read_report_json(const json& j) {
    RunConfig c = config_from_json(j.at("config"));
    SolveReport r;
    r.sigma = j.at("sigma").get<double>();
    r.solution.boundary_value = j.at("epsilon").get<double>();
    r.theta_reached = j.at("theta_reached").get<double>();
    r.final_residual = j.value("final_residual", 0.0);
    r.bisections = j.value("bisections", 0);
    r.converged = j.at("converged").get<bool>();
    r.failure = j.value("failure", std::string{});
    for (const auto& s : j.value("stages", json::array())) {
        StageRecord rec;
        rec.ladder = s.at("ladder").get<std::string>();
        rec.t = s.at("t").get<double>();
        rec.theta = s.at("theta").get<double>();
        rec.epsilon = s.at("epsilon").get<double>();
        rec.sigma = s.at("sigma").get<double>();
        rec.iterations = s.at("iterations").get<int>();
        rec.halvings = s.at("halvings").get<int>();
        rec.residuals = s.at("residuals").get<std::vector<double>>();
        rec.converged = s.at("converged").get<bool>();
        rec.message = s.value("message", std::string{});
        r.stages.push_back(std::move(rec));
    }
    for (const auto& l : j.value("epsilon_levels", json::array())) {
        r.epsilon_levels.push_back({l.at("epsilon").get<double>(), l.at("u").get<std::vector<double>>()});
    }
    return {c, r};
}

json scorecard_json(const Scorecard& card) {
    json entries = json::array();
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(shortest(v)); };
    for (const auto& e : card.entries) {
        entries.push_back({{"check_id", e.check_id},
                           {"relation", std::string(relation_symbol(e.relation))},
                           {"lhs", num(e.lhs)},
                           {"rhs", num(e.rhs)},
                           {"tolerance", num(e.tolerance)},
                           {"pass", e.pass},
                           {"margin", num(e.margin)},
                           {"enforced", e.enforced},
                           {"note", e.note}});
    }
    return json{{"pass", card.all_pass()}, {"entries", entries}};
}

}  // namespace plateau
