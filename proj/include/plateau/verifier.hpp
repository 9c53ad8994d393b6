#pragma once

// Checks of the estimates and identities a converged solution must satisfy.
// Every check produces scorecard entries recording both sides of the
// inequality and the tolerance; an entry passes only with positive margin.

#include "plateau/curvature.hpp"
#include "plateau/geometry.hpp"
#include "plateau/solver.hpp"

#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace plateau {

class ExtrapolationUnstable : public NumericalError {
public:
    using NumericalError::NumericalError;
};

enum class Relation { less_equal, less, greater_equal, greater, report };

std::string_view relation_symbol(Relation rel);

struct ScoreEntry {
    std::string check_id;
    Relation relation = Relation::report;
    double lhs = 0.0;
    double rhs = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    double margin = 0.0;
    bool enforced = true;  // false: reported only (e.g. a theorem hypothesis that does not hold)
    std::string note;
};

/// lhs REL rhs with slack `tolerance` on the rhs side.  margin > 0 is
/// required to pass; a non-finite side fails.
ScoreEntry compare(std::string check_id, double lhs, Relation rel, double rhs, double tolerance,
                   std::string note = {});

/// Reported measurement without a pass/fail meaning.
ScoreEntry measurement(std::string check_id, double value, std::string note = {});

struct Scorecard {
    std::vector<ScoreEntry> entries;

    void add(ScoreEntry e) { entries.push_back(std::move(e)); }
    void append(const Scorecard& other);
    [[nodiscard]] bool all_pass() const;
    [[nodiscard]] const ScoreEntry* find(std::string_view check_id) const;
    [[nodiscard]] std::vector<const ScoreEntry*> failures() const;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// r1: largest radius of interior tangent disks, r2: of exterior tangent
/// disks (+inf for convex domains).  n = 1: both equal to the half-width
/// and +inf.
struct BallRadii {
    double interior = 0.0;
    double exterior = kInfinity;
};

BallRadii ball_radii(const Domain& domain, int samples = 1024);

/// A solved instance and everything derived pointwise from it.
struct SolutionSnapshot {
    Domain domain;
    GridTopology topo;
    CurvatureSpec spec;  // operator actually solved (f^theta when theta > 0)
    double sigma = 0.5;
    double epsilon = 0.0;
    std::vector<double> u;
    std::vector<PointGeometry> geometry;

    static SolutionSnapshot make(const Domain& domain, const CurvatureSpec& spec, double sigma,
                                 const GridFunction& u);

    /// 10 h^2 with h the radial mesh size.
    [[nodiscard]] double discretization_tolerance() const;
    [[nodiscard]] double max_u() const;
    [[nodiscard]] std::vector<double> eta() const;
    /// u - x.Du at every node.
    [[nodiscard]] std::vector<double> starshape_field() const;
};

/// M = sqrt(1 - sigma^2)/r2 + eps (1 + sigma)/r2^2, zero for r2 = inf.
double exterior_constant(double sigma, double epsilon, double r2);

Scorecard max_principle_check(const SolutionSnapshot& s, const BallRadii& radii);
Scorecard curvature_bound_check(const SolutionSnapshot& s, const BallRadii& radii);

/// Per-node values at ladder heights eps_0 > eps_1 > ... extrapolated to
/// eps = 0 by the quadratic through the three smallest heights.  Throws
/// ExtrapolationUnstable when a node's values turn back by more than `noise`.
std::vector<double> extrapolate_to_zero(const std::vector<double>& epsilons,
                                        const std::vector<std::vector<double>>& values, double noise);

struct BoundaryAngleResult {
    std::vector<double> extrapolated_w;  // per boundary node
    double largest_epsilon_bounds_hold = 0.0;  // 0 when no ladder level satisfies both bounds
    Scorecard card;
};

/// Needs at least three epsilon levels; extrapolates through the three
/// smallest.  Throws ExtrapolationUnstable when a boundary node's w is
/// non-monotone across those levels by more than the discretization tolerance.
BoundaryAngleResult boundary_angle_check(const Domain& domain, double sigma,
                                         const std::vector<EpsilonLevel>& levels, const BallRadii& radii);

Scorecard structure_of_solution_checks(const SolutionSnapshot& s);

/// Pairing kappa = u kappa^e + nu, gamma^2 (I + Du Du^T) = I, kappa from (h, g),
/// the final residual and the identity G^{st} u_st = u G_u = G - tr F / w.
Scorecard identity_checks(const SolutionSnapshot& s);

/// Measured with fourth-order radial differences of u.
struct KernelNorms {
    double starshape = 0.0;    // |L(u - x.Du)|_inf over interior nodes
    double translation = 0.0;  // max_k |L u_k|_inf
};

KernelNorms kernel_norms(const SolutionSnapshot& s);

/// Every check on a finished solve.  Pass the original f; the operator
/// spec is reconstructed from report.theta_reached.
Scorecard verify_solution(const Domain& domain, const CurvatureSpec& spec, const SolveReport& report);

}  // namespace plateau
