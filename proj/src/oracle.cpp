#include "plateau/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace plateau {

double Cap::footprint() const { return radius * std::sqrt(1.0 - sigma * sigma); }

double Cap::value(const Vec& x) const { return std::sqrt(radius * radius - x.squaredNorm()) - sigma * radius; }

Vec Cap::gradient(const Vec& x) const { return -x / std::sqrt(radius * radius - x.squaredNorm()); }

Cap Cap::through(double sigma, double rho, double epsilon) {
    const double a = 1.0 - sigma * sigma;
    const double b = epsilon * sigma;
    return {(b + std::sqrt(b * b + a * (rho * rho + epsilon * epsilon))) / a, sigma};
}

double center_value(const GridTopology& topo, std::span<const double> u) {
    if (topo.dim == 1) {
        return u[topo.n_r - 1];
    }
    double m1 = 0.0;
    double m2 = 0.0;
    for (int m = 0; m < topo.n_phi; ++m) {
        m1 += u[m];
        m2 += u[topo.n_phi + m];
    }
    return (9.0 * m1 - m2) / (8.0 * topo.n_phi);
}

OracleResult run_cap_oracle(double sigma, double radius, const CurvatureSpec& spec, const std::vector<int>& grids,
                            Exec exec) {
    OracleResult out;
    out.sigma = sigma;
    out.radius = radius;
    const Cap limit{radius, sigma};
    const double rho = limit.footprint();
    for (int n_r : grids) {
        const auto domain = Domain::disk(rho, n_r, 2 * n_r);
        const auto topo = build_grid(domain);
        const auto start = std::chrono::steady_clock::now();
        const auto report =
            continuation_solve(domain, spec, sigma, ContinuationSchedule::defaults(domain, spec), exec);
        OracleLevel level;
        level.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        level.n_r = n_r;
        level.n_phi = 2 * n_r;
        level.epsilon = report.solution.boundary_value;
        const Cap matched = Cap::through(sigma, rho, level.epsilon);
        const auto& u = report.solution.values;
        const auto geo = geometry_field(topo, u);
        double sum = 0.0;
        level.boundary_w_min = std::numeric_limits<double>::infinity();
        for (int p = 0; p < topo.node_count; ++p) {
            const Vec x = topo.position(p);
            const double err = std::abs(u[p] - matched.value(x));
            level.linf = std::max(level.linf, err);
            level.linf_limit = std::max(level.linf_limit, std::abs(u[p] - limit.value(x)));
            if (p < topo.interior_count) {
                sum += err * err;
            }
            level.kappa_error = std::max(level.kappa_error, (geo[p].kappa.array() - sigma).abs().maxCoeff());
            if (p >= topo.interior_count) {
                level.boundary_w_min = std::min(level.boundary_w_min, geo[p].w);
                level.boundary_w_max = std::max(level.boundary_w_max, geo[p].w);
            }
        }
        level.l2 = std::sqrt(sum / topo.interior_count);
        level.exact_boundary_w = std::sqrt(1.0 + matched.gradient(topo.position(topo.interior_count)).squaredNorm());
        level.center_value = center_value(topo, u);
        out.levels.push_back(level);
    }
    for (std::size_t k = 1; k < out.levels.size(); ++k) {
        out.order_linf.push_back(std::log2(out.levels[k - 1].linf / out.levels[k].linf));
        out.order_l2.push_back(std::log2(out.levels[k - 1].l2 / out.levels[k].l2));
    }
    return out;
}

}  // namespace plateau
