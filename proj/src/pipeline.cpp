#include "plateau/pipeline.hpp"

#include "plateau/format.hpp"

#include <algorithm>

namespace plateau {

Scorecard function_axiom_checks(const CurvatureSpec& spec, std::uint64_t seed, int samples) {
    const auto r = structure_check(spec, samples, seed);
    Scorecard card;
    std::string note = "samples " + std::to_string(r.samples);
    if (!r.violations.empty()) {
        note += ", first: " + r.violations.front().property;
    }
    card.add(compare("f.axioms", static_cast<double>(r.violations.size()), Relation::less, 1.0, 0.0,
                     note));
    return card;
}

Scorecard full_scorecard(const Domain& domain, const CurvatureSpec& spec, const SolveReport& report,
                         std::uint64_t seed) {
    auto card = verify_solution(domain, spec, report);
    try {
        card.append(duality_scorecard(domain, spec, report));
    } catch (const NumericalError& e) {
        card.add(compare("dual.map", kInfinity, Relation::less_equal, 0.0, 0.0, e.what()));
    }
    card.append(function_axiom_checks(spec, seed));
    return card;
}

ContinuationSchedule stop_at_theta(ContinuationSchedule schedule, double theta) {
    std::erase_if(schedule.theta_steps, [&](double t) { return !(t > theta); });
    schedule.theta_steps.push_back(theta);
    return schedule;
}

double max_curvature(const GridTopology& topo, std::span<const double> u) {
    const auto geo = geometry_field(topo, u);
    double k = 0.0;
    for (int p = 0; p < topo.interior_count; ++p) {
        k = std::max(k, geo[p].kappa.maxCoeff());
    }
    return k;
}

RunOutcome run_configuration(const RunConfig& config, const ContinuationSchedule& schedule) {
    RunOutcome out;
    const auto domain = config.make_domain();
    const auto spec = config.make_spec();
    std::string log;
    auto sink = [&](const std::string& line) { log += line + '\n'; };
    try {
        out.report = continuation_solve(domain, spec, config.sigma, schedule, config.exec, sink);
        out.solved = true;
    } catch (const ScheduleExhausted& e) {
        out.report = e.partial();
        out.failure = e.what();
    } catch (const std::exception& e) {
        out.failure = e.what();
        out.report.failure = e.what();
    }
    if (!out.solved) {
        log += "failed: " + out.failure + '\n';
        out.files.report_json = report_json(config, out.report).dump(2) + '\n';
        out.files.convergence_log = log;
        return out;
    }
    const auto topo = build_grid(domain);
    out.card = full_scorecard(domain, spec, out.report, config.seed);
    out.pass = out.card.all_pass();
    out.files.solution_csv = solution_csv(topo, out.report.solution.values, out.report.sigma);
    out.files.report_json = report_json(config, out.report).dump(2) + '\n';
    out.files.scorecard_json = scorecard_json(out.card).dump(2) + '\n';
    out.files.convergence_log = log;
    return out;
}

}  // namespace plateau
