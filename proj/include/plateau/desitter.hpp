#pragma once

// Hodograph/Legendre transport of a convex hyperbolic graph u over x to its
// dual spacelike graph v over y in de Sitter steady-state space:
//   y = x + u Du,  v = u w,  grad v = Du / w,
// with q = (|x|^2 + u^2)/2, p = (|y|^2 - v^2)/2 and y = Dq(x), x = Dp(y).
// Sign convention: the de Sitter normal is chosen so that the equidistant
// cap with kappa = sigma maps to kappa* = 1/sigma > 0.

#include "plateau/curvature.hpp"
#include "plateau/geometry.hpp"
#include "plateau/solver.hpp"
#include "plateau/verifier.hpp"

#include <iosfwd>
#include <vector>

namespace plateau {

class HodographDegenerate : public NumericalError {
public:
    using NumericalError::NumericalError;
};

struct DeSitterPoint {
    Vec x;       // source point
    double u = 0.0;
    Vec y;
    double v = 0.0;
    Vec grad_v;
    Mat hess_v;
    double w_s = 1.0;  // sqrt(1 - |grad v|^2)
    Mat metric;        // (I - grad v grad v^T) / v^2
    Mat second_form;   // (I - grad v grad v^T - v hess v) / (v^2 w_s)
    Vec kappa_star;    // ascending; empty until dual_curvatures runs
    double p = 0.0;    // (|y|^2 - v^2)/2
    double q = 0.0;    // (|x|^2 + u^2)/2
};

/// One node: transports (u, Du, D^2u) at x.  Throws HodographDegenerate
/// when D^2q = I + Du Du^T + u D^2u is not positive definite.
DeSitterPoint map_point(const Vec& x, double u, const Vec& du, const Mat& d2u);

/// Every node of the grid (interior then boundary).
std::vector<DeSitterPoint> forward_map(const GridTopology& topo, std::span<const double> u);

/// Generalized eigenvalues of (second_form, metric); throws NumericalError
/// when the metric is not positive definite.
void dual_curvatures(std::vector<DeSitterPoint>& cloud);

/// Checks on the cloud of a solved instance: spacelike bound, round trip,
/// reciprocity kappa*_i kappa_{n+1-i} = 1, f*(kappa*) = 1/sigma, Legendre
/// identity and convexity of p.  `kappa` holds the hyperbolic curvatures of
/// the source nodes (ascending); the level and convexity checks skip the
/// boundary nodes.
Scorecard duality_checks(const std::vector<DeSitterPoint>& cloud, const std::vector<Vec>& kappa,
                         int interior_count, const CurvatureSpec& spec, double sigma);

/// Extrapolated boundary w_s = 1/w against sigma, within 2%.
Scorecard dual_boundary_check(const Domain& domain, double sigma, const std::vector<EpsilonLevel>& levels);

/// Duality checks plus the boundary check on a finished solve; the operator
/// spec is reconstructed from report.theta_reached.
Scorecard duality_scorecard(const Domain& domain, const CurvatureSpec& spec, const SolveReport& report);

/// Columns y_1..y_n, v, dv_1..dv_n, kappa*_1..kappa*_n.
void write_cloud_csv(std::ostream& os, const std::vector<DeSitterPoint>& cloud);

}  // namespace plateau
