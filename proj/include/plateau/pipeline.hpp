#pragma once

// Everything the command-line tool runs on one configuration, without the
// file handling.

#include "plateau/config.hpp"
#include "plateau/desitter.hpp"
#include "plateau/io.hpp"
#include "plateau/verifier.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace plateau {

/// Randomized axioms of f (monotone, homogeneous, concave, normalized).
Scorecard function_axiom_checks(const CurvatureSpec& spec, std::uint64_t seed, int samples = 256);

/// verify_solution + duality_scorecard + function_axiom_checks.
Scorecard full_scorecard(const Domain& domain, const CurvatureSpec& spec, const SolveReport& report,
                         std::uint64_t seed);

/// The configured schedule stopped at blend weight theta: the theta ladder
/// keeps its steps above theta and ends there.
ContinuationSchedule stop_at_theta(ContinuationSchedule schedule, double theta);

struct RunFiles {
    std::string solution_csv;
    std::string report_json;
    std::string scorecard_json;
    std::string convergence_log;
};

struct RunOutcome {
    bool solved = false;
    bool pass = false;
    std::string failure;
    SolveReport report;
    Scorecard card;
    RunFiles files;  // solution_csv and scorecard_json are empty when the solve failed
};

/// Solves and scores one configuration; solver failures are caught and
/// recorded in the outcome.
RunOutcome run_configuration(const RunConfig& config, const ContinuationSchedule& schedule);

/// Largest interior kappa_max of a solution.
double max_curvature(const GridTopology& topo, std::span<const double> u);

}  // namespace plateau
