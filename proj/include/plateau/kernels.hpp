#pragma once

// Per-node evaluation of the curvature operator G(D^2u, Du, u) = F(A[u]) and
// its linearization.  Each kernel has a serial reference loop and an OpenMP
// loop over the same node function; tests hold them equal bit for bit.

#include "plateau/curvature.hpp"
#include "plateau/geometry.hpp"

#include <span>
#include <vector>

namespace plateau {

enum class Exec { serial, openmp };

namespace kernels {

/// Value of G at one node plus the smallest eigenvalue of A[u].  `ok` is
/// false when A[u] leaves the positive cone (value is then undefined).
struct NodeValue {
    double value = 0.0;
    double min_eig = 0.0;
    bool ok = false;
};

NodeValue operator_value(const CurvatureSpec& spec, double u, const Vec& du, const Mat& d2u);

/// Coefficients of the linearized operator at one node:
/// L psi = G^{st} psi_st + G^s psi_s + G_u psi.
struct NodeLinearization {
    NodeValue base;
    Mat second;   // G^{st} = (u/w) gamma F gamma
    Vec first;    // G^s, Richardson-extrapolated central differences
    double zeroth = 0.0;  // G_u = (G - tr F / w) / u
    double trace_f = 0.0;
    double w = 1.0;
    bool ok = false;
};

NodeLinearization linearize_node(const CurvatureSpec& spec, double u, const Vec& du, const Mat& d2u);

/// G at every interior node from precomputed Cartesian jets.
void evaluate_values(Exec exec, const CurvatureSpec& spec, std::span<const double> u,
                     const GridDerivatives& jets, int interior_count, std::span<NodeValue> out);

void evaluate_linearization(Exec exec, const CurvatureSpec& spec, std::span<const double> u,
                            const GridDerivatives& jets, int interior_count,
                            std::span<NodeLinearization> out);

}  // namespace kernels
}  // namespace plateau
