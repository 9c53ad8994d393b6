#include "plateau/format.hpp"
#include "plateau/oracle.hpp"
#include "plateau/pipeline.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

using namespace plateau;
namespace fs = std::filesystem;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitSolver = 1;
constexpr int kExitScorecard = 2;
constexpr int kExitUsage = 64;

struct Flags {
    std::string config;
    std::string out;
    std::string grid;
    std::string sigma;
    std::string f;
    std::string seed;
    std::string schedule;
};

struct Invocation {
    std::string command_line;            // argv[1..] joined by spaces
    std::vector<std::size_t> arg_column;  // 1-based column of argv[i] in command_line
};

int column_of(const Invocation& inv, const std::vector<std::string>& argv, const std::string& needle) {
    for (std::size_t i = 0; i < argv.size(); ++i) {
        if (argv[i].find(needle) != std::string::npos) {
            return static_cast<int>(inv.arg_column[i]);
        }
    }
    return 1;
}

RunConfig load_config(const Flags& flags, const std::vector<std::string>& extras, const Invocation& inv,
                      const std::vector<std::string>& argv) {
    RawConfig raw;
    if (!flags.config.empty()) {
        std::string text;
        try {
            text = read_file(flags.config);
        } catch (const std::exception& e) {
            throw ConfigError(e.what(), flags.config, 0, 0);
        }
        raw = parse_config_text(text, flags.config);
    }
    const std::string source = "<command line>";
    auto apply = [&](const char* key, const std::string& value) {
        if (value.empty()) {
            return;
        }
        const std::string flag = std::string("--") + key;
        const int col = column_of(inv, argv, flag);
        const std::string assignment = flag + "=" + value;
        apply_override(raw, assignment, source, col);
    };
    apply("grid", flags.grid);
    apply("sigma", flags.sigma);
    apply("f", flags.f);
    apply("seed", flags.seed);
    apply("schedule", flags.schedule);
    apply("out", flags.out);
    for (const auto& e : extras) {
        apply_override(raw, e, source, column_of(inv, argv, e));
    }
    return build_config(raw);
}

void print_card(const Scorecard& card) {
    for (const auto& e : card.entries) {
        std::printf("%-42s %s %s %s %s tol=%s margin=%s%s\n", e.check_id.c_str(), e.pass ? "PASS" : "FAIL",
                    shortest(e.lhs).c_str(), std::string(relation_symbol(e.relation)).c_str(),
                    shortest(e.rhs).c_str(), shortest(e.tolerance).c_str(), shortest(e.margin).c_str(),
                    e.enforced ? "" : " (reported)");
    }
}

void write_outcome(const fs::path& dir, const RunOutcome& o) {
    write_file_atomic(dir / "report.json", o.files.report_json);
    write_file_atomic(dir / "convergence.log", o.files.convergence_log);
    if (o.solved) {
        write_file_atomic(dir / "solution.csv", o.files.solution_csv);
        write_file_atomic(dir / "scorecard.json", o.files.scorecard_json);
    }
}

int cmd_solve(const RunConfig& config) {
    const auto domain = config.make_domain();
    const auto spec = config.make_spec();
    const auto outcome = run_configuration(config, config.make_schedule(domain, spec));
    write_outcome(config.out, outcome);
    if (!outcome.solved) {
        std::cerr << "solver failure: " << outcome.failure << '\n';
        return kExitSolver;
    }
    print_card(outcome.card);
    std::printf("scorecard: %s\n", outcome.pass ? "pass" : "FAIL");
    return outcome.pass ? kExitPass : kExitScorecard;
}

struct Stored {
    RunConfig config;
    SolveReport report;
    Domain domain;
    CurvatureSpec spec = CurvatureSpec::mean(2);
};

Stored load_stored(const fs::path& dir) {
    Stored s;
    auto [config, report] = read_report_json(nlohmann::json::parse(read_file(dir / "report.json")));
    if (!report.converged) {
        throw std::runtime_error("stored run did not converge: " + report.failure);
    }
    s.config = config;
    s.domain = config.make_domain();
    s.spec = config.make_spec();
    const auto boundary_value = report.solution.boundary_value;
    report.solution.values = read_solution_csv(read_file(dir / "solution.csv"), s.domain.dim);
    report.solution.boundary_value = boundary_value;
    if (static_cast<int>(report.solution.values.size()) != build_grid(s.domain).node_count) {
        throw std::runtime_error("solution.csv row count does not match the stored grid");
    }
    s.report = std::move(report);
    return s;
}

int cmd_verify(const fs::path& dir) {
    const auto s = load_stored(dir);
    const auto card = full_scorecard(s.domain, s.spec, s.report, s.config.seed);
    write_file_atomic(dir / "scorecard.json", scorecard_json(card).dump(2) + '\n');
    print_card(card);
    std::printf("scorecard: %s\n", card.all_pass() ? "pass" : "FAIL");
    return card.all_pass() ? kExitPass : kExitScorecard;
}

int cmd_dualize(const fs::path& dir) {
    const auto s = load_stored(dir);
    Scorecard card;
    try {
        const auto topo = build_grid(s.domain);
        auto cloud = forward_map(topo, s.report.solution.values);
        dual_curvatures(cloud);
        std::ostringstream os;
        write_cloud_csv(os, cloud);
        write_file_atomic(dir / "cloud.csv", os.str());
        card = duality_scorecard(s.domain, s.spec, s.report);
    } catch (const NumericalError& e) {
        card.add(compare("dual.map", kInfinity, Relation::less_equal, 0.0, 0.0, e.what()));
    }
    write_file_atomic(dir / "dual_scorecard.json", scorecard_json(card).dump(2) + '\n');
    print_card(card);
    std::printf("dual scorecard: %s\n", card.all_pass() ? "pass" : "FAIL");
    return card.all_pass() ? kExitPass : kExitScorecard;
}

int cmd_oracle(const RunConfig& config) {
    const auto spec = parse_curvature(config.f, 2);
    OracleResult result;
    try {
        result = run_cap_oracle(config.sigma, config.oracle_radius, spec, config.oracle_grids, config.exec);
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    }
    std::string table = "n_r,n_phi,epsilon,linf,l2,order_linf,order_l2,linf_eps0,kappa_error,"
                        "boundary_w_min,boundary_w_max,exact_boundary_w,exact_boundary_w_eps0,u0\n";
    const double w_limit = 1.0 / config.sigma;
    for (std::size_t k = 0; k < result.levels.size(); ++k) {
        const auto& l = result.levels[k];
        const auto order = [&](const std::vector<double>& o) { return k == 0 ? std::string() : shortest(o[k - 1]); };
        table += std::to_string(l.n_r) + ',' + std::to_string(l.n_phi) + ',' + shortest(l.epsilon) + ',' +
                 shortest(l.linf) + ',' + shortest(l.l2) + ',' + order(result.order_linf) + ',' +
                 order(result.order_l2) + ',' + shortest(l.linf_limit) + ',' + shortest(l.kappa_error) + ',' +
                 shortest(l.boundary_w_min) + ',' + shortest(l.boundary_w_max) + ',' +
                 shortest(l.exact_boundary_w) + ',' + shortest(w_limit) + ',' + shortest(l.center_value) + '\n';
    }
    write_file_atomic(fs::path(config.out) / "oracle.csv", table);
    std::fputs(table.c_str(), stdout);
    return kExitPass;
}

int cmd_sweep(const RunConfig& base) {
    const bool by_sigma = !base.sweep_sigma.empty();
    if (by_sigma == !base.sweep_theta.empty()) {
        std::cerr << "sweep needs exactly one non-empty list: sweep_sigma or sweep_theta\n";
        return kExitUsage;
    }
    auto values = by_sigma ? base.sweep_sigma : base.sweep_theta;
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    const std::string name = by_sigma ? "sigma" : "theta";
    std::vector<RunOutcome> outcomes(values.size());
    std::vector<RunConfig> configs(values.size());
    const auto domain = base.make_domain();
    const auto spec = base.make_spec();
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < values.size(); ++i) {
        RunConfig c = base;
        c.exec = Exec::serial;
        c.sweep_sigma.clear();
        c.sweep_theta.clear();
        auto schedule = c.make_schedule(domain, spec);
        if (by_sigma) {
            c.sigma = values[i];
        } else {
            schedule = stop_at_theta(schedule, values[i]);
        }
        c.out = (fs::path(base.out) / (name + "_" + shortest(values[i]))).string();
        outcomes[i] = run_configuration(c, schedule);
        configs[i] = c;
    }
    std::string table = name + ",status,pass,failed_checks,theta_reached,epsilon,kappa_max,kappa_bound\n";
    bool all = true;
    const auto topo = build_grid(domain);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto& o = outcomes[i];
        write_outcome(configs[i].out, o);
        all = all && o.solved && o.pass;
        std::string failed;
        std::string reason = o.failure;
        std::replace(reason.begin(), reason.end(), ',', ';');
        for (const auto* e : o.card.failures()) {
            failed += (failed.empty() ? "" : ";") + e->check_id;
        }
        const auto* bound = o.card.find("curvature_bound.kappa_max");
        table += shortest(values[i]) + ',' + (o.solved ? "solved" : "solver_failure") + ',' +
                 (o.solved && o.pass ? "true" : "false") + ',' + (o.solved ? failed : reason) + ',' +
                 shortest(o.report.theta_reached) + ',' + shortest(o.report.solution.boundary_value) + ',' +
                 (o.solved ? shortest(max_curvature(topo, o.report.solution.values)) : "nan") + ',' +
                 (bound != nullptr ? shortest(bound->rhs) : "nan") + '\n';
    }
    write_file_atomic(fs::path(base.out) / "sweep.csv", table);
    std::fputs(table.c_str(), stdout);
    return all ? kExitPass : kExitScorecard;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Convex constant-curvature graphs over the ideal boundary of hyperbolic space"};
    app.require_subcommand(1);
    Flags flags;
    auto add_common = [&](CLI::App* sub, bool solve_flags) {
        sub->add_option("--config", flags.config, "key = value config file");
        sub->add_option("--out", flags.out, "output directory");
        if (solve_flags) {
            sub->add_option("--grid", flags.grid, "NR or NR,NPHI");
            sub->add_option("--sigma", flags.sigma, "curvature level in (0,1)");
            sub->add_option("--f", flags.f, "mean | gauss | power_mean:k | quotient:k,l | blend:t,f | dual:f");
            sub->add_option("--seed", flags.seed, "seed for randomized checks");
            sub->add_option("--schedule", flags.schedule, "t=..;theta=..;eps=..;bisections=N");
            sub->allow_extras();
        }
    };
    auto* solve = app.add_subcommand("solve", "solve and score one configuration");
    auto* verify = app.add_subcommand("verify", "re-score solution.csv in --out");
    auto* dualize = app.add_subcommand("dualize", "write the de Sitter cloud of solution.csv in --out");
    auto* oracle = app.add_subcommand("oracle", "refinement study against the equidistant cap");
    auto* sweep = app.add_subcommand("sweep", "independent solves over sweep_sigma or sweep_theta");
    add_common(solve, true);
    add_common(verify, false);
    add_common(dualize, false);
    add_common(oracle, true);
    add_common(sweep, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    std::vector<std::string> args(argv + 1, argv + argc);
    Invocation inv;
    for (const auto& a : args) {
        inv.arg_column.push_back(inv.command_line.size() + 1);
        inv.command_line += a + ' ';
    }

    try {
        if (verify->parsed() || dualize->parsed()) {
            const fs::path dir = flags.out.empty() ? fs::path("out") : fs::path(flags.out);
            try {
                return verify->parsed() ? cmd_verify(dir) : cmd_dualize(dir);
            } catch (const std::exception& e) {
                std::cerr << "cannot load stored run from " << dir.string() << ": " << e.what() << '\n';
                return kExitUsage;
            }
        }
        CLI::App* sub = solve->parsed() ? solve : oracle->parsed() ? oracle : sweep;
        const auto config = load_config(flags, sub->remaining(), inv, args);
        if (solve->parsed()) {
            return cmd_solve(config);
        }
        if (oracle->parsed()) {
            return cmd_oracle(config);
        }
        return cmd_sweep(config);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        if (!e.source().empty() && e.source() == "<command line>" && e.column() > 0) {
            std::cerr << "  " << inv.command_line << '\n'
                      << "  " << std::string(static_cast<std::size_t>(e.column() - 1), ' ') << "^\n";
        }
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSolver;
    }
}
