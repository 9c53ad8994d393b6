#include "plateau/desitter.hpp"

#include "plateau/format.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace plateau {

DeSitterPoint map_point(const Vec& x, double u, const Vec& du, const Mat& d2u) {
    const auto n = du.size();
    const Mat id = Mat::Identity(n, n);
    Mat d2q = id + du * du.transpose() + u * d2u;
    d2q = 0.5 * (d2q + d2q.transpose()).eval();
    if (!(symmetric_eigenvalues(d2q)(0) > 0.0)) {
        throw HodographDegenerate("hodograph Jacobian I + Du Du^T + u D^2u is not positive definite");
    }
    const double w = std::sqrt(1.0 + du.squaredNorm());
    DeSitterPoint pt;
    pt.x = x;
    pt.u = u;
    pt.y = x + u * du;
    pt.v = u * w;
    pt.grad_v = du / w;
    pt.w_s = 1.0 / w;
    const Mat dgrad = (id - du * du.transpose() / (w * w)) * d2u / w;
    Mat hess = dgrad * d2q.inverse();
    pt.hess_v = 0.5 * (hess + hess.transpose());
    const Mat base = id - pt.grad_v * pt.grad_v.transpose();
    pt.metric = base / (pt.v * pt.v);
    pt.second_form = (base - pt.v * pt.hess_v) / (pt.v * pt.v * pt.w_s);
    pt.p = 0.5 * (pt.y.squaredNorm() - pt.v * pt.v);
    pt.q = 0.5 * (x.squaredNorm() + u * u);
    return pt;
}

std::vector<DeSitterPoint> forward_map(const GridTopology& topo, std::span<const double> u) {
    const auto d = differentiate(topo, u);
    std::vector<DeSitterPoint> cloud(topo.node_count);
    for (int p = 0; p < topo.node_count; ++p) {
        try {
            cloud[p] = map_point(topo.position(p), u[p], d.gradient(p), d.hessian(p));
        } catch (const HodographDegenerate& e) {
            throw HodographDegenerate(std::string(e.what()) + " at node " + std::to_string(p));
        }
    }
    return cloud;
}

void dual_curvatures(std::vector<DeSitterPoint>& cloud) {
    for (auto& pt : cloud) {
        pt.kappa_star = principal_curvatures(pt.second_form, pt.metric);
    }
}

Scorecard duality_checks(const std::vector<DeSitterPoint>& cloud, const std::vector<Vec>& kappa,
                         int interior_count, const CurvatureSpec& spec, double sigma) {
    const auto dual = dual_f(spec);
    double spacelike = 0.0;
    double round_trip = 0.0;
    double reciprocity = 0.0;
    double level = 0.0;
    double legendre = 0.0;
    double convex_p = kInfinity;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto& pt = cloud[i];
        spacelike = std::max(spacelike, pt.grad_v.norm());
        round_trip = std::max(round_trip, std::abs(pt.v * pt.w_s - pt.u));
        round_trip = std::max(round_trip, (pt.y - pt.v * pt.grad_v - pt.x).cwiseAbs().maxCoeff());
        legendre = std::max(legendre, std::abs(pt.p + pt.q - pt.x.dot(pt.y)));
        const Vec& ks = pt.kappa_star;
        const Vec& k = kappa[i];
        const auto n = ks.size();
        for (Eigen::Index j = 0; j < n; ++j) {
            reciprocity = std::max(reciprocity, std::abs(ks(j) * k(n - 1 - j) - 1.0));
        }
        if (static_cast<int>(i) >= interior_count) {
            continue;
        }
        level = std::max(level, std::abs(eval_f(dual, ks).value - 1.0 / sigma));
        const Mat hess_p = Mat::Identity(n, n) - pt.grad_v * pt.grad_v.transpose() - pt.v * pt.hess_v;
        convex_p = std::min(convex_p, symmetric_eigenvalues(hess_p)(0));
    }
    Scorecard card;
    card.add(compare("dual.spacelike", spacelike, Relation::less, 1.0, 0.0, "max |grad v|"));
    card.add(compare("dual.round_trip", round_trip, Relation::less_equal, 1e-12, 0.0,
                     "v w_s = u and y - v grad v = x"));
    card.add(compare("dual.reciprocity", reciprocity, Relation::less_equal, 1e-8, 0.0,
                     "max |kappa*_i kappa_(n+1-i) - 1|"));
    card.add(compare("dual.level", level, Relation::less_equal, 1e-8, 0.0, "max |f*(kappa*) - 1/sigma|"));
    card.add(compare("dual.legendre", legendre, Relation::less_equal, 1e-10, 0.0, "max |p + q - x.y|"));
    card.add(compare("dual.convexity_p", convex_p, Relation::greater, 0.0, 0.0,
                     "min eigenvalue of D^2 (|y|^2 - v^2)/2 at interior nodes"));
    return card;
}

Scorecard dual_boundary_check(const Domain& domain, double sigma, const std::vector<EpsilonLevel>& levels) {
    if (levels.size() < 3) {
        throw std::invalid_argument("dual boundary check needs at least three epsilon levels");
    }
    const auto topo = build_grid(domain);
    const double h = domain.mesh_size();
    std::vector<double> eps;
    std::vector<std::vector<double>> ws(levels.size());
    for (std::size_t l = 0; l < levels.size(); ++l) {
        eps.push_back(levels[l].epsilon);
        const auto d = differentiate(topo, levels[l].u);
        for (int p = topo.interior_count; p < topo.node_count; ++p) {
            ws[l].push_back(1.0 / std::sqrt(1.0 + d.gradient(p).squaredNorm()));
        }
    }
    const auto limit = extrapolate_to_zero(eps, ws, 10.0 * h * h);
    double worst = 0.0;
    for (double v : limit) {
        worst = std::max(worst, std::abs(v - sigma));
    }
    Scorecard card;
    card.add(compare("dual.boundary_w_s", worst, Relation::less_equal, 0.02 * sigma, 0.0,
                     "max |w_s(eps -> 0) - sigma| over boundary nodes"));
    return card;
}

void write_cloud_csv(std::ostream& os, const std::vector<DeSitterPoint>& cloud) {
    const auto n = cloud.empty() ? 0 : cloud.front().y.size();
    for (Eigen::Index k = 0; k < n; ++k) {
        os << "y" << k + 1 << ',';
    }
    os << 'v';
    for (Eigen::Index k = 0; k < n; ++k) {
        os << ",dv" << k + 1;
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        os << ",kappa_star" << k + 1;
    }
    os << '\n';
    for (const auto& pt : cloud) {
        for (Eigen::Index k = 0; k < n; ++k) {
            os << shortest(pt.y(k)) << ',';
        }
        os << shortest(pt.v);
        for (Eigen::Index k = 0; k < n; ++k) {
            os << ',' << shortest(pt.grad_v(k));
        }
        for (Eigen::Index k = 0; k < n; ++k) {
            os << ',' << (k < pt.kappa_star.size() ? shortest(pt.kappa_star(k)) : std::string("nan"));
        }
        os << '\n';
    }
}

Scorecard duality_scorecard(const Domain& domain, const CurvatureSpec& spec, const SolveReport& report) {
    const auto topo = build_grid(domain);
    auto cloud = forward_map(topo, report.solution.values);
    dual_curvatures(cloud);
    const auto geo = geometry_field(topo, report.solution.values);
    std::vector<Vec> kappa;
    kappa.reserve(geo.size());
    for (const auto& g : geo) {
        kappa.push_back(g.kappa);
    }
    auto card = duality_checks(cloud, kappa, topo.interior_count, blended_spec(spec, report.theta_reached),
                               report.sigma);
    if (report.epsilon_levels.size() >= 3) {
        try {
            card.append(dual_boundary_check(domain, report.sigma, report.epsilon_levels));
        } catch (const ExtrapolationUnstable& e) {
            card.add(compare("dual.boundary_w_s", kInfinity, Relation::less_equal, 0.02 * report.sigma, 0.0,
                             e.what()));
        }
    }
    return card;
}

}  // namespace plateau
