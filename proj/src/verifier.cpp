#include "plateau/verifier.hpp"

#include "plateau/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace plateau {

std::string_view relation_symbol(Relation rel) {
    switch (rel) {
        case Relation::less_equal: return "<=";
        case Relation::less: return "<";
        case Relation::greater_equal: return ">=";
        case Relation::greater: return ">";
        case Relation::report: return "report";
    }
    return "?";
}

ScoreEntry compare(std::string check_id, double lhs, Relation rel, double rhs, double tolerance, std::string note) {
    ScoreEntry e;
    e.check_id = std::move(check_id);
    e.relation = rel;
    e.lhs = lhs;
    e.rhs = rhs;
    e.tolerance = tolerance;
    e.note = std::move(note);
    switch (rel) {
        case Relation::less_equal:
        case Relation::less: e.margin = rhs + tolerance - lhs; break;
        case Relation::greater_equal:
        case Relation::greater: e.margin = lhs - (rhs - tolerance); break;
        case Relation::report: e.margin = 0.0; break;
    }
    e.pass = rel == Relation::report || (std::isfinite(lhs) && !std::isnan(rhs) && e.margin > 0.0);
    return e;
}

ScoreEntry measurement(std::string check_id, double value, std::string note) {
    auto e = compare(std::move(check_id), value, Relation::report, 0.0, 0.0, std::move(note));
    e.enforced = false;
    return e;
}

void Scorecard::append(const Scorecard& other) {
    entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

bool Scorecard::all_pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const ScoreEntry& e) { return e.pass || !e.enforced; });
}

const ScoreEntry* Scorecard::find(std::string_view check_id) const {
    for (const auto& e : entries) {
        if (e.check_id == check_id) {
            return &e;
        }
    }
    return nullptr;
}

std::vector<const ScoreEntry*> Scorecard::failures() const {
    std::vector<const ScoreEntry*> out;
    for (const auto& e : entries) {
        if (e.enforced && !e.pass) {
            out.push_back(&e);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ball radii

namespace {

struct BoundarySample {
    double x, y;    // point
    double nx, ny;  // outward unit normal
    double curvature;
};

std::vector<BoundarySample> sample_boundary(const RadialProfile& rho, int count) {
    std::vector<BoundarySample> out(count);
    for (int i = 0; i < count; ++i) {
        const double phi = 2.0 * std::numbers::pi * i / count;
        const auto s = rho.sample(phi);
        const double c = std::cos(phi);
        const double sn = std::sin(phi);
        const double tx = s.first * c - s.value * sn;
        const double ty = s.first * sn + s.value * c;
        const double len = std::hypot(tx, ty);
        const double speed2 = s.value * s.value + s.first * s.first;
        out[i] = {s.value * c, s.value * sn, ty / len, -tx / len,
                  (speed2 + s.first * s.first - s.value * s.second) / std::pow(speed2, 1.5)};
    }
    return out;
}

// Largest r such that the disk of radius r tangent at sample i on the side
// `side` (-1 inside, +1 outside) contains no other boundary sample.
double tangent_radius(const std::vector<BoundarySample>& pts, int i, double side, double r_min, double r_max) {
    const auto& p = pts[i];
    auto clear = [&](double r) {
        const double cx = p.x + side * r * p.nx;
        const double cy = p.y + side * r * p.ny;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (static_cast<int>(j) == i) {
                continue;
            }
            if (std::hypot(pts[j].x - cx, pts[j].y - cy) < r * (1.0 - 1e-12)) {
                return false;
            }
        }
        return true;
    };
    if (!clear(r_min)) {
        return r_min;
    }
    double lo = r_min;
    double hi = lo;
    while (hi < r_max) {
        hi = std::min(2.0 * lo, r_max);
        if (!clear(hi)) {
            break;
        }
        lo = hi;
    }
    if (lo >= r_max) {
        return kInfinity;
    }
    for (int it = 0; it < 60 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (clear(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace

BallRadii ball_radii(const Domain& domain, int samples) {
    if (domain.dim == 1) {
        return {domain.half_width, kInfinity};
    }
    const auto pts = sample_boundary(domain.rho, samples);
    const double scale = domain.max_radius();
    const double r_min = 1e-6 * scale;
    BallRadii out{kInfinity, kInfinity};
    bool convex = true;
    for (int i = 0; i < samples; ++i) {
        double inner = tangent_radius(pts, i, -1.0, r_min, 4.0 * scale);
        if (pts[i].curvature > 0.0) {
            inner = std::min(inner, 1.0 / pts[i].curvature);
        }
        out.interior = std::min(out.interior, inner);
        if (pts[i].curvature < 0.0) {
            convex = false;
            out.exterior = std::min(out.exterior, 1.0 / -pts[i].curvature);
        }
    }
    if (!convex) {
        for (int i = 0; i < samples; ++i) {
            out.exterior = std::min(out.exterior, tangent_radius(pts, i, 1.0, r_min, 1e6 * scale));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Snapshot

SolutionSnapshot SolutionSnapshot::make(const Domain& domain, const CurvatureSpec& spec, double sigma,
                                        const GridFunction& u) {
    SolutionSnapshot s{domain, build_grid(domain), spec, sigma, u.boundary_value, u.values, {}};
    if (static_cast<int>(s.u.size()) != s.topo.node_count) {
        throw std::invalid_argument("solution size does not match the grid");
    }
    s.geometry = geometry_field(s.topo, s.u);
    return s;
}

double SolutionSnapshot::discretization_tolerance() const {
    const double h = domain.mesh_size();
    return 10.0 * h * h;
}

double SolutionSnapshot::max_u() const { return *std::max_element(u.begin(), u.end()); }

std::vector<double> SolutionSnapshot::eta() const {
    std::vector<double> out(geometry.size());
    for (std::size_t p = 0; p < geometry.size(); ++p) {
        out[p] = (sigma - geometry[p].nu) / geometry[p].u;
    }
    return out;
}

std::vector<double> SolutionSnapshot::starshape_field() const {
    std::vector<double> out(geometry.size());
    for (std::size_t p = 0; p < geometry.size(); ++p) {
        out[p] = geometry[p].u - geometry[p].x.dot(geometry[p].du);
    }
    return out;
}

double exterior_constant(double sigma, double epsilon, double r2) {
    if (!std::isfinite(r2)) {
        return 0.0;
    }
    return std::sqrt(1.0 - sigma * sigma) / r2 + epsilon * (1.0 + sigma) / (r2 * r2);
}

// ---------------------------------------------------------------------------
// Maximum principle

Scorecard max_principle_check(const SolutionSnapshot& s, const BallRadii& radii) {
    const auto eta = s.eta();
    const int ni = s.topo.interior_count;
    double interior = -kInfinity;
    double boundary = -kInfinity;
    double norm = 0.0;
    for (int p = 0; p < s.topo.node_count; ++p) {
        (p < ni ? interior : boundary) = std::max(p < ni ? interior : boundary, eta[p]);
        norm = std::max(norm, std::abs(eta[p]));
    }
    const double tol = s.discretization_tolerance() * std::max(1.0, norm);
    Scorecard card;
    card.add(compare("max_principle.eta", interior, Relation::less_equal, boundary, tol,
                     "interior max of (sigma - nu)/u against its boundary max"));
    if (std::isfinite(radii.exterior)) {
        const double m = exterior_constant(s.sigma, s.epsilon, radii.exterior);
        card.add(compare("max_principle.exterior_ball", std::max(interior, boundary), Relation::less_equal, m, tol,
                         "max of (sigma - nu)/u against M from the exterior ball radius"));
    }
    return card;
}

// ---------------------------------------------------------------------------
// Curvature bound

Scorecard curvature_bound_check(const SolutionSnapshot& s, const BallRadii& radii) {
    const double m = exterior_constant(s.sigma, s.epsilon, radii.exterior);
    const double umax = s.max_u();
    const double a = 0.5 * s.sigma / (1.0 + m * umax);
    const double b = 0.25 * a;
    double nu_min = kInfinity;
    double kappa_max = -kInfinity;
    double weighted = -kInfinity;
    for (const auto& g : s.geometry) {
        const double k = g.kappa(g.kappa.size() - 1);
        nu_min = std::min(nu_min, g.nu);
        kappa_max = std::max(kappa_max, k);
        const double denom = g.nu - a;
        weighted = std::max(weighted, denom > 0.0 ? std::pow(g.u, b) * k / denom : kInfinity);
    }
    Scorecard card;
    const bool convex = !std::isfinite(radii.exterior);
    auto hyp = compare("curvature_bound.hypothesis", nu_min, Relation::greater_equal, 2.0 * a,
                       s.discretization_tolerance(), "min nu against 2a");
    if (!hyp.pass && !convex) {
        hyp.enforced = false;
        hyp.note += "; HypothesisUnmet: the bound does not apply";
    }
    card.add(std::move(hyp));
    card.add(measurement("curvature_bound.a", a));
    card.add(measurement("curvature_bound.M", m));
    card.add(compare("curvature_bound.kappa_max", kappa_max, Relation::less, 8.0 * std::pow(a, -2.5), 0.0,
                     "largest principal curvature against 8 a^(-5/2)"));
    card.add(compare("curvature_bound.weighted", weighted, Relation::less,
                     8.0 * std::pow(a, -2.5) * std::pow(umax, b), 0.0,
                     "max u^b kappa_max / (nu - a) with b = a/4"));
    return card;
}

// ---------------------------------------------------------------------------
// Boundary angle

std::vector<double> extrapolate_to_zero(const std::vector<double>& epsilons,
                                        const std::vector<std::vector<double>>& values, double noise) {
    if (epsilons.size() < 3 || values.size() != epsilons.size()) {
        throw std::invalid_argument("extrapolation needs at least three epsilon levels");
    }
    const std::size_t k = epsilons.size() - 3;
    const double e0 = epsilons[k];
    const double e1 = epsilons[k + 1];
    const double e2 = epsilons[k + 2];
    const double c0 = e1 * e2 / ((e0 - e1) * (e0 - e2));
    const double c1 = e0 * e2 / ((e1 - e0) * (e1 - e2));
    const double c2 = e0 * e1 / ((e2 - e0) * (e2 - e1));
    std::vector<double> out(values[k].size());
    for (std::size_t b = 0; b < out.size(); ++b) {
        const double w0 = values[k][b];
        const double w1 = values[k + 1][b];
        const double w2 = values[k + 2][b];
        const double d1 = w1 - w0;
        const double d2 = w2 - w1;
        if (d1 * d2 < 0.0 && std::min(std::abs(d1), std::abs(d2)) > noise) {
            std::ostringstream os;
            os << "values non-monotone across the epsilon ladder at boundary node " << b << ": " << w0 << ", " << w1
               << ", " << w2;
            throw ExtrapolationUnstable(os.str());
        }
        out[b] = c0 * w0 + c1 * w1 + c2 * w2;
    }
    return out;
}

BoundaryAngleResult boundary_angle_check(const Domain& domain, double sigma,
                                         const std::vector<EpsilonLevel>& levels, const BallRadii& radii) {
    if (levels.size() < 3) {
        throw std::invalid_argument("boundary angle check needs at least three epsilon levels");
    }
    const auto topo = build_grid(domain);
    const int nb = topo.boundary_count();
    const double h = domain.mesh_size();
    const double noise = 10.0 * h * h;

    BoundaryAngleResult out;
    std::vector<std::vector<double>> w(levels.size());
    const double root = std::sqrt(1.0 - sigma * sigma);
    double lower_last = 0.0;
    double upper_last = 0.0;
    double min_gap_last = 0.0;
    double max_gap_last = 0.0;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const double eps = levels[l].epsilon;
        const auto geo = geometry_field(topo, levels[l].u);
        double lower = 0.0;
        if (std::isfinite(radii.exterior)) {
            lower = -eps * root / radii.exterior - eps * eps * (1.0 + sigma) / (radii.exterior * radii.exterior);
        }
        const double upper =
            eps * root / radii.interior + eps * eps * (1.0 - sigma) / (radii.interior * radii.interior);
        double lo = kInfinity;
        double hi = -kInfinity;
        for (int b = 0; b < nb; ++b) {
            const auto& g = geo[topo.interior_count + b];
            w[l].push_back(g.w);
            lo = std::min(lo, g.nu - sigma);
            hi = std::max(hi, g.nu - sigma);
        }
        if (lo > lower - noise && hi < upper + noise) {
            out.largest_epsilon_bounds_hold = std::max(out.largest_epsilon_bounds_hold, eps);
        }
        lower_last = lower;
        upper_last = upper;
        min_gap_last = lo;
        max_gap_last = hi;
    }

    std::vector<double> eps;
    for (const auto& l : levels) {
        eps.push_back(l.epsilon);
    }
    out.extrapolated_w = extrapolate_to_zero(eps, w, noise);
    double worst = 0.0;
    for (double we : out.extrapolated_w) {
        worst = std::max(worst, std::abs(we - 1.0 / sigma));
    }
    out.card.add(compare("boundary_angle.extrapolated_w", worst, Relation::less_equal, 0.02 / sigma, 0.0,
                         "max |w(eps -> 0) - 1/sigma| over boundary nodes"));
    out.card.add(compare("boundary_angle.ball_bounds", out.largest_epsilon_bounds_hold, Relation::greater, 0.0, 0.0,
                         "largest ladder epsilon at which both ball bounds on nu - sigma hold"));
    auto lower = compare("boundary_angle.lower_bound", min_gap_last, Relation::greater, lower_last, noise,
                         "min (nu - sigma) on the boundary at the smallest epsilon");
    auto upper = compare("boundary_angle.upper_bound", max_gap_last, Relation::less, upper_last, noise,
                         "max (nu - sigma) on the boundary at the smallest epsilon");
    lower.enforced = false;
    upper.enforced = false;
    out.card.add(std::move(lower));
    out.card.add(std::move(upper));
    return out;
}

// ---------------------------------------------------------------------------
// Structure of the solution

Scorecard structure_of_solution_checks(const SolutionSnapshot& s) {
    const int ni = s.topo.interior_count;
    const double tol = s.discretization_tolerance();
    const auto star = s.starshape_field();
    const double umax = s.max_u();

    double convex_min = kInfinity;
    double star_min = kInfinity;
    double star_interior_min = kInfinity;
    double star_boundary_min = kInfinity;
    double identity = 0.0;
    double nu_gap = kInfinity;
    for (int p = 0; p < s.topo.node_count; ++p) {
        const auto& g = s.geometry[p];
        const int n = static_cast<int>(g.du.size());
        if (p < ni) {
            const Mat q = Mat::Identity(n, n) + g.du * g.du.transpose() + g.u * g.d2u;
            convex_min = std::min(convex_min, 2.0 * symmetric_eigenvalues(0.5 * (q + q.transpose()))(0));
            star_interior_min = std::min(star_interior_min, star[p]);
        } else {
            star_boundary_min = std::min(star_boundary_min, star[p]);
        }
        star_min = std::min(star_min, star[p]);
        // Euclidean unit normal (-Du, 1)/w against the position (x, u).
        const double x_dot_normal = (g.u - g.x.dot(g.du)) / g.w;
        identity = std::max(identity, std::abs(star[p] - g.w * x_dot_normal) / std::max(1.0, std::abs(star[p])));
        nu_gap = std::min(nu_gap, g.nu - g.u / umax);
    }

    Scorecard card;
    card.add(compare("structure.convexity_u2_plus_x2", convex_min, Relation::greater, 0.0, 0.0,
                     "min eigenvalue of D^2(u^2 + |x|^2) over interior nodes"));
    card.add(compare("structure.starshape_positive", star_min, Relation::greater, 0.0, 0.0, "min of u - x.Du"));
    card.add(compare("structure.starshape_boundary", star_boundary_min, Relation::greater, s.epsilon, 0.0,
                     "min over the boundary of u - x.Du = eps + |Du| x.N"));
    auto interior_vs_boundary =
        compare("structure.starshape_interior_minimum", star_interior_min, Relation::greater_equal,
                star_boundary_min, tol, "interior min of u - x.Du against its boundary min");
    interior_vs_boundary.enforced = false;
    card.add(std::move(interior_vs_boundary));
    card.add(compare("structure.starshape_identity", identity, Relation::less_equal, 1e-12, 0.0,
                     "u - x.Du = w (X.N)"));
    card.add(compare("structure.nu_lower_bound", nu_gap, Relation::greater_equal, 0.0, tol, "min (nu - u/max u)"));

    const auto& h_boundary = s.topo.boundary_mean_curvature;
    const bool mean_convex = std::all_of(h_boundary.begin(), h_boundary.end(), [](double h) { return h >= 0.0; });
    if (mean_convex) {
        const auto op = linearize(s.topo, s.u, s.spec, Exec::serial);
        const double gu_max = *std::max_element(op.zeroth.begin(), op.zeroth.end());
        card.add(compare("structure.g_u_negative", gu_max, Relation::less, 0.0, 0.0,
                         "max of G_u over interior nodes (mean convex domain)"));
    }
    return card;
}

// ---------------------------------------------------------------------------
// Pointwise identities

Scorecard identity_checks(const SolutionSnapshot& s) {
    const int ni = s.topo.interior_count;
    const auto jets = differentiate(s.topo, s.u);
    double pairing = 0.0;
    double gamma = 0.0;
    double two_route = 0.0;
    double residual = 0.0;
    for (int p = 0; p < ni; ++p) {
        const auto& g = s.geometry[p];
        const int n = static_cast<int>(g.du.size());
        for (int i = 0; i < n; ++i) {
            pairing = std::max(pairing, std::abs(g.kappa(i) - (g.u * g.kappa_e(i) + g.nu)));
        }
        const Mat id = Mat::Identity(n, n);
        gamma = std::max(gamma, (g.gamma * g.gamma * (id + g.du * g.du.transpose()) - id).cwiseAbs().maxCoeff());
        const auto t = surface_tensors(g.u, g.du, g.d2u);
        const Vec k2 = principal_curvatures(t.second_form, t.metric);
        two_route = std::max(two_route, (k2 - g.kappa).cwiseAbs().maxCoeff() / std::max(1.0, g.kappa.norm()));
        residual = std::max(residual, std::abs(eval_f(s.spec, g.kappa).value - s.sigma));
    }
    const auto op = linearize(s.topo, s.u, s.spec, Exec::serial);
    double euler = 0.0;
    for (int p = 0; p < ni; ++p) {
        const Mat d2u = jets.hessian(p);
        const double contraction = op.second[p].cwiseProduct(d2u).sum();
        const double scale = std::max(1.0, std::abs(contraction));
        euler = std::max(euler, std::abs(contraction - s.u[p] * op.zeroth[p]) / scale);
        euler = std::max(euler, std::abs(contraction - (op.value[p] - op.trace_f[p] / op.w[p])) / scale);
    }
    Scorecard card;
    card.add(compare("identity.pairing", pairing, Relation::less_equal, 1e-10, 0.0, "kappa = u kappa^e + nu"));
    card.add(compare("identity.gamma", gamma, Relation::less_equal, 1e-10, 0.0, "gamma^2 (I + Du Du^T) = I"));
    card.add(compare("identity.two_route_kappa", two_route, Relation::less_equal, 1e-9, 0.0,
                     "eigenvalues of (h, g) against eigenvalues of A[u]"));
    card.add(compare("identity.linearization", euler, Relation::less_equal, 1e-9, 0.0,
                     "G^{st} u_st = u G_u = G - tr F / w"));
    card.add(compare("solver.residual", residual, Relation::less_equal, 10.0 * residual_tolerance(s.sigma), 0.0,
                     "max |F(A[u]) - sigma| at interior nodes"));
    return card;
}

KernelNorms kernel_norms(const SolutionSnapshot& s) {
    const auto& topo = s.topo;
    const auto jets = differentiate_fourth(topo, s.u);
    std::vector<kernels::NodeLinearization> nodes(topo.interior_count);
    for (int p = 0; p < topo.interior_count; ++p) {
        nodes[p] = kernels::linearize_node(s.spec, s.u[p], jets.gradient(p), jets.hessian(p));
    }
    auto norm = [&](const std::vector<double>& psi) {
        const auto d = differentiate_fourth(topo, psi);
        double m = 0.0;
        for (int p = 0; p < topo.interior_count; ++p) {
            const auto& nl = nodes[p];
            if (!nl.ok) {
                return kInfinity;
            }
            const double l = nl.second.cwiseProduct(d.hessian(p)).sum() + nl.first.dot(d.gradient(p)) +
                             nl.zeroth * psi[p];
            m = std::max(m, std::abs(l));
        }
        return m;
    };
    KernelNorms out;
    std::vector<double> star(topo.node_count);
    for (int p = 0; p < topo.node_count; ++p) {
        star[p] = s.u[p] - topo.position(p).dot(jets.gradient(p));
    }
    out.starshape = norm(star);
    for (int k = 0; k < topo.dim; ++k) {
        std::vector<double> uk(topo.node_count);
        for (int p = 0; p < topo.node_count; ++p) {
            uk[p] = jets.gradient(p)(k);
        }
        out.translation = std::max(out.translation, norm(uk));
    }
    return out;
}

Scorecard verify_solution(const Domain& domain, const CurvatureSpec& spec, const SolveReport& report) {
    const auto op_spec = blended_spec(spec, report.theta_reached);
    const auto snap = SolutionSnapshot::make(domain, op_spec, report.sigma, report.solution);
    const auto radii = ball_radii(domain);
    Scorecard card;
    card.add(measurement("domain.interior_radius", radii.interior));
    card.add(measurement("domain.exterior_radius", radii.exterior));
    card.append(identity_checks(snap));
    card.append(max_principle_check(snap, radii));
    card.append(curvature_bound_check(snap, radii));
    if (report.epsilon_levels.size() >= 3) {
        try {
            card.append(boundary_angle_check(domain, report.sigma, report.epsilon_levels, radii).card);
        } catch (const ExtrapolationUnstable& e) {
            card.add(compare("boundary_angle.extrapolated_w", kInfinity, Relation::less_equal, 0.02 / report.sigma,
                             0.0, e.what()));
        }
    }
    card.append(structure_of_solution_checks(snap));
    const auto kn = kernel_norms(snap);
    card.add(measurement("kernel.starshape", kn.starshape, "|L(u - x.Du)|_inf"));
    card.add(measurement("kernel.translation", kn.translation, "max_k |L u_k|_inf"));
    return card;
}

}  // namespace plateau
