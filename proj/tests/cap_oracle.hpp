#pragma once

// Closed-form equidistant sphere |(x, u) - (0, -sigma R)| = R, kept apart
// from the library so tests compare against an independent formula.

#include "plateau/geometry.hpp"

#include <cmath>

namespace testing_oracle {

struct CapFormula {
    double R;
    double sigma;

    double s(const plateau::Vec& x) const { return std::sqrt(R * R - x.squaredNorm()); }
    double value(const plateau::Vec& x) const { return s(x) - sigma * R; }
    plateau::Vec gradient(const plateau::Vec& x) const { return -x / s(x); }
    plateau::Mat hessian(const plateau::Vec& x) const {
        const double sv = s(x);
        const auto n = x.size();
        return -plateau::Mat::Identity(n, n) / sv - x * x.transpose() / (sv * sv * sv);
    }
};

// Sphere of the family through height eps over |x| = rho:
// rho^2 + (eps + sigma R)^2 = R^2.
inline CapFormula matched_cap(double sigma, double rho, double eps) {
    const double a = 1.0 - sigma * sigma;
    const double R = (eps * sigma + std::sqrt(eps * eps * sigma * sigma + a * (rho * rho + eps * eps))) / a;
    return {R, sigma};
}

inline std::vector<double> sample(const plateau::GridTopology& topo, const CapFormula& cap) {
    std::vector<double> u(topo.node_count);
    for (int p = 0; p < topo.node_count; ++p) {
        u[p] = cap.value(topo.position(p));
    }
    return u;
}

}  // namespace testing_oracle
