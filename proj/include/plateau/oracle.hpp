#pragma once

// Equidistant-sphere caps u(x) = sqrt(R^2 - |x|^2) - sigma R, umbilic with
// kappa = sigma, and the refinement study that compares solves against them.

#include "plateau/curvature.hpp"
#include "plateau/geometry.hpp"
#include "plateau/kernels.hpp"
#include "plateau/solver.hpp"

#include <vector>

namespace plateau {

struct Cap {
    double radius = 1.0;
    double sigma = 0.5;

    /// Radius of the disk where the cap meets u = 0.
    [[nodiscard]] double footprint() const;
    [[nodiscard]] double value(const Vec& x) const;
    [[nodiscard]] Vec gradient(const Vec& x) const;

    /// The cap through height epsilon over the circle |x| = rho.
    static Cap through(double sigma, double rho, double epsilon);
};

struct OracleLevel {
    int n_r = 0;
    int n_phi = 0;
    double epsilon = 0.0;
    double linf = 0.0;        // against the cap matched to epsilon
    double l2 = 0.0;          // root mean square over interior nodes
    double linf_limit = 0.0;  // against the epsilon = 0 cap
    double kappa_error = 0.0; // max |kappa_i - sigma| over all nodes
    double boundary_w_min = 0.0;
    double boundary_w_max = 0.0;
    double exact_boundary_w = 0.0;
    double center_value = 0.0;
    double seconds = 0.0;
};

struct OracleResult {
    double sigma = 0.5;
    double radius = 1.0;
    std::vector<OracleLevel> levels;
    std::vector<double> order_linf;  // log2 ratios of consecutive levels
    std::vector<double> order_l2;
};

/// u(0) from the ring means m_1, m_2 at r = h/2, 3h/2: (9 m_1 - m_2)/8.
/// n = 1: the node at the origin.
double center_value(const GridTopology& topo, std::span<const double> u);

/// Solves on the disk of radius R sqrt(1 - sigma^2) at N_r in `grids`
/// (N_phi = 2 N_r) with the default schedule.  Throws ScheduleExhausted.
OracleResult run_cap_oracle(double sigma, double radius, const CurvatureSpec& spec, const std::vector<int>& grids,
                            Exec exec = Exec::openmp);

}  // namespace plateau
