#pragma once

// Dirichlet problem G(D^2u, Du, u) = sigma in Omega, u = epsilon on the
// boundary, solved by damped Newton steps inside three continuation ladders:
// the level homotopy sigma^t = t sigma + (1 - t), the blend weight theta of
// f^theta = theta H_n^{1/n} + (1 - theta) f, and the boundary height epsilon.

#include "plateau/block_tridiagonal.hpp"
#include "plateau/curvature.hpp"
#include "plateau/geometry.hpp"
#include "plateau/kernels.hpp"

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace plateau {

/// Some interior node left the positive cone.
class ConvexityLoss : public NumericalError {
public:
    ConvexityLoss(std::string what, std::vector<int> nodes)
        : NumericalError(std::move(what)), nodes_(std::move(nodes)) {}
    [[nodiscard]] const std::vector<int>& nodes() const { return nodes_; }

private:
    std::vector<int> nodes_;
};

class NoProgress : public NumericalError {
public:
    using NumericalError::NumericalError;
};

struct ResidualField {
    std::vector<double> values;   // interior: G - sigma, boundary: u - epsilon
    std::vector<int> nonconvex;   // interior nodes with min eig A[u] <= floor
    double min_eigenvalue = 0.0;

    [[nodiscard]] double max_norm() const;
    [[nodiscard]] double interior_l2(int interior_count) const;
};

/// Non-throwing form: nodes whose A[u] has min eigenvalue <= floor are listed
/// and their residual entry is left at zero.
ResidualField evaluate_residual(const GridTopology& topo, std::span<const double> u, const CurvatureSpec& spec,
                                double sigma, double epsilon, double floor = 0.0, Exec exec = Exec::openmp);

/// Throws ConvexityLoss if A[u] is not positive definite at some interior node.
std::vector<double> residual(const GridTopology& topo, const GridFunction& u, const CurvatureSpec& spec,
                             double sigma, Exec exec = Exec::openmp);

struct LinearizedOperator {
    int dim = 2;
    int interior_count = 0;
    std::vector<Mat> second;       // G^{st}
    std::vector<Vec> first;        // G^s
    std::vector<double> zeroth;    // G_u
    std::vector<double> value;     // G
    std::vector<double> trace_f;   // sum_i F^{ii}
    std::vector<double> w;
    std::vector<double> coeffs;    // interior * kJetStride, on parameter derivatives
};

/// Throws ConvexityLoss as residual does.
LinearizedOperator linearize(const GridTopology& topo, std::span<const double> u, const CurvatureSpec& spec,
                             Exec exec = Exec::openmp);

/// L psi at interior nodes; psi may be nonzero on the boundary.
std::vector<double> apply_operator(const LinearizedOperator& op, const GridTopology& topo,
                                   std::span<const double> psi);

/// Matrix of L restricted to interior unknowns (boundary values held fixed).
BlockTridiagonal assemble(const LinearizedOperator& op, const GridTopology& topo);

inline constexpr double kKappaFloor = 1e-8;

struct NewtonOptions {
    double tolerance = 1e-9;
    double kappa_floor = kKappaFloor;
    int max_iterations = 40;
    int max_halvings = 30;
    Exec exec = Exec::openmp;
};

/// tol_res = 1e-9 max(1, sigma).
double residual_tolerance(double sigma);

struct NewtonResult {
    GridFunction u;
    int iterations = 0;
    int halvings = 0;
    std::vector<double> residual_history;  // max norm, starting with the initial guess
};

/// Throws NoProgress, SingularJacobian or ConvexityLoss (initial guess).
NewtonResult newton_solve(const GridTopology& topo, GridFunction u0, const CurvatureSpec& spec, double sigma,
                          const NewtonOptions& options);

struct ContinuationSchedule {
    std::vector<double> t_steps;        // 0 = t_0 < ... < t_K = 1
    std::vector<double> theta_steps;    // decreasing
    std::vector<double> epsilon_steps;  // decreasing, positive
    int max_bisections = 12;

    /// t in {0, .25, .5, .75, 1}; theta in {.5, .25, .1, .02, 0} unless f is
    /// H_n^{1/n}; epsilon_k = 0.05 max(rho) 2^{-k}, k = 0..6.
    static ContinuationSchedule defaults(const Domain& domain, const CurvatureSpec& spec);
    void validate() const;
};

/// f^theta, or f itself when theta = 0 or f is already H_n^{1/n}.
CurvatureSpec blended_spec(const CurvatureSpec& spec, double theta);

struct StageRecord {
    std::string ladder;  // "t", "theta", "epsilon"
    double t = 0.0;
    double theta = 0.0;
    double epsilon = 0.0;
    double sigma = 0.0;
    int iterations = 0;
    int halvings = 0;
    std::vector<double> residuals;
    bool converged = false;
    std::string message;
};

struct EpsilonLevel {
    double epsilon = 0.0;
    std::vector<double> u;
};

struct SolveReport {
    GridFunction solution;
    double sigma = 0.0;
    double theta_reached = 0.0;
    double final_residual = 0.0;
    int bisections = 0;
    bool converged = false;
    std::vector<StageRecord> stages;
    std::vector<EpsilonLevel> epsilon_levels;  // finished solutions, descending epsilon
    std::string failure;
};

class ScheduleExhausted : public std::runtime_error {
public:
    ScheduleExhausted(const std::string& what, SolveReport partial)
        : std::runtime_error(what), partial_(std::make_shared<SolveReport>(std::move(partial))) {}
    [[nodiscard]] const SolveReport& partial() const { return *partial_; }

private:
    std::shared_ptr<SolveReport> partial_;
};

/// Log sink for per-iteration progress lines.
using ProgressLog = std::function<void(const std::string&)>;

SolveReport continuation_solve(const Domain& domain, const CurvatureSpec& spec, double sigma,
                               const ContinuationSchedule& schedule, Exec exec = Exec::openmp,
                               const ProgressLog& log = {});

}  // namespace plateau
