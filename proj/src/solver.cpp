#include "plateau/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace plateau {

// ---------------------------------------------------------------------------
// Residual

double ResidualField::max_norm() const {
    double m = 0.0;
    for (double v : values) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

double ResidualField::interior_l2(int interior_count) const {
    double s = 0.0;
    for (int p = 0; p < interior_count; ++p) {
        s += values[p] * values[p];
    }
    return std::sqrt(s);
}

ResidualField evaluate_residual(const GridTopology& topo, std::span<const double> u, const CurvatureSpec& spec,
                                double sigma, double epsilon, double floor, Exec exec) {
    const auto jets = differentiate(topo, u);
    std::vector<kernels::NodeValue> nodes(topo.interior_count);
    kernels::evaluate_values(exec, spec, u, jets, topo.interior_count, nodes);
    ResidualField r;
    r.values.assign(topo.node_count, 0.0);
    r.min_eigenvalue = 1e300;
    for (int p = 0; p < topo.interior_count; ++p) {
        const auto& nv = nodes[p];
        r.min_eigenvalue = std::min(r.min_eigenvalue, nv.min_eig);
        if (!nv.ok || !(nv.min_eig > floor)) {
            r.nonconvex.push_back(p);
            continue;
        }
        r.values[p] = nv.value - sigma;
    }
    for (int p = topo.interior_count; p < topo.node_count; ++p) {
        r.values[p] = u[p] - epsilon;
    }
    return r;
}

namespace {

[[noreturn]] void throw_convexity(const std::vector<int>& nodes) {
    std::ostringstream os;
    os << "A[u] not positive definite at " << nodes.size() << " interior node(s), first " << nodes.front();
    throw ConvexityLoss(os.str(), nodes);
}

}  // namespace

std::vector<double> residual(const GridTopology& topo, const GridFunction& u, const CurvatureSpec& spec,
                             double sigma, Exec exec) {
    auto r = evaluate_residual(topo, u.values, spec, sigma, u.boundary_value, 0.0, exec);
    if (!r.nonconvex.empty()) {
        throw_convexity(r.nonconvex);
    }
    return std::move(r.values);
}

// ---------------------------------------------------------------------------
// Linearization

LinearizedOperator linearize(const GridTopology& topo, std::span<const double> u, const CurvatureSpec& spec,
                             Exec exec) {
    const auto jets = differentiate(topo, u);
    const int count = topo.interior_count;
    std::vector<kernels::NodeLinearization> nodes(count);
    kernels::evaluate_linearization(exec, spec, u, jets, count, nodes);

    LinearizedOperator op;
    op.dim = topo.dim;
    op.interior_count = count;
    op.second.resize(count);
    op.first.resize(count);
    op.zeroth.resize(count);
    op.value.resize(count);
    op.trace_f.resize(count);
    op.w.resize(count);
    op.coeffs.assign(static_cast<std::size_t>(count) * kJetStride, 0.0);
    std::vector<int> bad;
    const int slots = jet_size(topo.dim);
    for (int p = 0; p < count; ++p) {
        auto& nl = nodes[p];
        if (!nl.ok) {
            bad.push_back(p);
            continue;
        }
        op.second[p] = nl.second;
        op.first[p] = nl.first;
        op.zeroth[p] = nl.zeroth;
        op.value[p] = nl.base.value;
        op.trace_f[p] = nl.trace_f;
        op.w[p] = nl.w;
        double cart[kJetStride] = {0, 0, 0, 0, 0};
        if (topo.dim == 1) {
            cart[0] = nl.first(0);
            cart[1] = nl.second(0, 0);
        } else {
            cart[0] = nl.first(0);
            cart[1] = nl.first(1);
            cart[2] = nl.second(0, 0);
            cart[3] = nl.second(0, 1) + nl.second(1, 0);
            cart[4] = nl.second(1, 1);
        }
        const auto& t = topo.transform[p];
        double* alpha = &op.coeffs[static_cast<std::size_t>(p) * kJetStride];
        for (int col = 0; col < slots; ++col) {
            double acc = 0.0;
            for (int row = 0; row < slots; ++row) {
                acc += cart[row] * t[row * 5 + col];
            }
            alpha[col] = acc;
        }
    }
    if (!bad.empty()) {
        throw_convexity(bad);
    }
    return op;
}

std::vector<double> apply_operator(const LinearizedOperator& op, const GridTopology& topo,
                                   std::span<const double> psi) {
    const auto params = parameter_derivatives(topo, psi);
    const int slots = jet_size(topo.dim);
    std::vector<double> out(op.interior_count, 0.0);
    for (int p = 0; p < op.interior_count; ++p) {
        double acc = op.zeroth[p] * psi[p];
        for (int c = 0; c < slots; ++c) {
            acc += op.coeffs[static_cast<std::size_t>(p) * kJetStride + c] *
                   params[static_cast<std::size_t>(p) * kJetStride + c];
        }
        out[p] = acc;
    }
    return out;
}

BlockTridiagonal assemble(const LinearizedOperator& op, const GridTopology& topo) {
    BlockTridiagonal jac(topo.blocks(), topo.block_size());
    const double h = topo.dr;
    const double h2 = h * h;
    if (topo.dim == 1) {
        const int blocks = topo.blocks();
        for (int p = 0; p < op.interior_count; ++p) {
            const double* a = &op.coeffs[static_cast<std::size_t>(p) * kJetStride];
            jac.diag(p)(0, 0) += -2.0 * a[1] / h2 + op.zeroth[p];
            if (p > 0) {
                jac.lower(p)(0, 0) += -a[0] / (2.0 * h) + a[1] / h2;
            }
            if (p + 1 < blocks) {
                jac.upper(p)(0, 0) += a[0] / (2.0 * h) + a[1] / h2;
            }
        }
        return jac;
    }

    const int nr = topo.n_r;
    const int np = topo.n_phi;
    const int half = np / 2;
    const auto& d1 = topo.d1_phi;
    const auto& d2 = topo.d2_phi;
    for (int j = 1; j < nr; ++j) {
        const int b = j - 1;
        auto& diag = jac.diag(b);
        for (int m = 0; m < np; ++m) {
            const int p = topo.node(j, m);
            const double* a = &op.coeffs[static_cast<std::size_t>(p) * kJetStride];
            const double a_r = a[0];
            const double a_phi = a[1];
            const double a_rr = a[2];
            const double a_rphi = a[3];
            const double a_phiphi = a[4];
            diag.row(m) += a_phi * d1.row(m) + a_phiphi * d2.row(m);
            diag(m, m) += -2.0 * a_rr / h2 + op.zeroth[p];
            if (j + 1 < nr) {
                auto& up = jac.upper(b);
                up.row(m) += (a_rphi / (2.0 * h)) * d1.row(m);
                up(m, m) += a_r / (2.0 * h) + a_rr / h2;
            }
            const double centre = -a_r / (2.0 * h) + a_rr / h2;
            const double mixed = -a_rphi / (2.0 * h);
            if (j > 1) {
                auto& lo = jac.lower(b);
                lo.row(m) += mixed * d1.row(m);
                lo(m, m) += centre;
            } else {
                // inner neighbour is the parity image of ring 1 across the pole
                for (int q = 0; q < np; ++q) {
                    diag(m, (q + half) % np) += mixed * d1(m, q);
                }
                diag(m, (m + half) % np) += centre;
            }
        }
    }
    return jac;
}

// ---------------------------------------------------------------------------
// Newton

double residual_tolerance(double sigma) { return 1e-9 * std::max(1.0, sigma); }

NewtonResult newton_solve(const GridTopology& topo, GridFunction u0, const CurvatureSpec& spec, double sigma,
                          const NewtonOptions& options) {
    NewtonResult result;
    result.u = std::move(u0);
    auto& u = result.u.values;
    const double eps = result.u.boundary_value;
    for (int p = topo.interior_count; p < topo.node_count; ++p) {
        u[p] = eps;
    }
    auto r = evaluate_residual(topo, u, spec, sigma, eps, 0.0, options.exec);
    if (!r.nonconvex.empty()) {
        throw_convexity(r.nonconvex);
    }
    result.residual_history.push_back(r.max_norm());
    const int count = topo.interior_count;
    while (r.max_norm() > options.tolerance) {
        if (result.iterations >= options.max_iterations) {
            throw NoProgress("Newton iteration limit reached at residual " + std::to_string(r.max_norm()));
        }
        const auto op = linearize(topo, u, spec, options.exec);
        const auto jac = assemble(op, topo);
        Eigen::VectorXd rhs(count);
        for (int p = 0; p < count; ++p) {
            rhs(p) = -r.values[p];
        }
        const Eigen::VectorXd delta = jac.solve(rhs);
        const double merit = r.interior_l2(count);
        double lambda = 1.0;
        bool accepted = false;
        std::vector<double> trial(u);
        for (int halving = 0; halving <= options.max_halvings; ++halving) {
            for (int p = 0; p < count; ++p) {
                trial[p] = u[p] + lambda * delta(p);
            }
            auto rt = evaluate_residual(topo, trial, spec, sigma, eps, options.kappa_floor, options.exec);
            if (rt.nonconvex.empty() && rt.interior_l2(count) < merit) {
                u.swap(trial);
                r = std::move(rt);
                accepted = true;
                break;
            }
            lambda *= 0.5;
            ++result.halvings;
        }
        if (!accepted) {
            throw NoProgress("no residual decrease after " + std::to_string(options.max_halvings) + " halvings");
        }
        ++result.iterations;
        result.residual_history.push_back(r.max_norm());
    }
    return result;
}

// ---------------------------------------------------------------------------
// Continuation

CurvatureSpec blended_spec(const CurvatureSpec& spec, double theta) {
    if (theta > 0.0 && !spec.is_gauss()) {
        return CurvatureSpec::blend(theta, spec);
    }
    return spec;
}

ContinuationSchedule ContinuationSchedule::defaults(const Domain& domain, const CurvatureSpec& spec) {
    ContinuationSchedule s;
    s.t_steps = {0.0, 0.25, 0.5, 0.75, 1.0};
    if (spec.is_gauss()) {
        s.theta_steps = {0.0};
    } else {
        s.theta_steps = {0.5, 0.25, 0.1, 0.02, 0.0};
    }
    const double eps0 = 0.05 * domain.max_radius();
    for (int k = 0; k <= 6; ++k) {
        s.epsilon_steps.push_back(std::ldexp(eps0, -k));
    }
    return s;
}

void ContinuationSchedule::validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument(m); };
    if (t_steps.size() < 2 || t_steps.front() != 0.0 || t_steps.back() != 1.0) {
        fail("t ladder must start at 0 and end at 1");
    }
    if (!std::is_sorted(t_steps.begin(), t_steps.end()) ||
        std::adjacent_find(t_steps.begin(), t_steps.end()) != t_steps.end()) {
        fail("t ladder must be strictly increasing");
    }
    if (theta_steps.empty()) {
        fail("theta ladder must not be empty");
    }
    for (std::size_t i = 0; i < theta_steps.size(); ++i) {
        if (!(theta_steps[i] >= 0.0 && theta_steps[i] <= 1.0)) {
            fail("theta values must lie in [0,1]");
        }
        if (i > 0 && !(theta_steps[i] < theta_steps[i - 1])) {
            fail("theta ladder must be strictly decreasing");
        }
    }
    if (epsilon_steps.empty()) {
        fail("epsilon ladder must not be empty");
    }
    for (std::size_t i = 0; i < epsilon_steps.size(); ++i) {
        if (!(epsilon_steps[i] > 0.0)) {
            fail("epsilon values must be positive");
        }
        if (i > 0 && !(epsilon_steps[i] < epsilon_steps[i - 1])) {
            fail("epsilon ladder must be strictly decreasing");
        }
    }
    if (max_bisections < 0) {
        fail("bisection limit must be non-negative");
    }
}

namespace {

std::string format_stage(const StageRecord& s) {
    std::ostringstream os;
    os.precision(6);
    os << "ladder=" << s.ladder << " t=" << s.t << " theta=" << s.theta << " eps=" << s.epsilon
       << " sigma=" << s.sigma;
    return os.str();
}

}  // namespace

SolveReport continuation_solve(const Domain& domain, const CurvatureSpec& spec, double sigma,
                               const ContinuationSchedule& schedule, Exec exec, const ProgressLog& log) {
    if (!(sigma > 0.0 && sigma < 1.0)) {
        throw std::invalid_argument("sigma must lie in (0,1)");
    }
    domain.validate();
    schedule.validate();
    const auto topo = build_grid(domain);

    SolveReport report;
    report.sigma = sigma;
    auto emit = [&](const std::string& line) {
        if (log) {
            log(line);
        }
    };

    double t = schedule.t_steps.front();
    double theta = schedule.theta_steps.front();
    double eps = schedule.epsilon_steps.front();
    GridFunction u = constant_function(topo, eps);

    // One Newton solve at the given parameters, warm-started from u.
    auto attempt = [&](const std::string& ladder, double tt, double th, double ee) -> bool {
        StageRecord rec;
        rec.ladder = ladder;
        rec.t = tt;
        rec.theta = th;
        rec.epsilon = ee;
        rec.sigma = tt * sigma + (1.0 - tt);
        GridFunction start = u;
        if (ee != start.boundary_value) {
            const double shift = ee - start.boundary_value;
            for (double& v : start.values) {
                v += shift;
            }
            start.boundary_value = ee;
        }
        NewtonOptions opts;
        opts.tolerance = residual_tolerance(rec.sigma);
        opts.exec = exec;
        try {
            auto res = newton_solve(topo, std::move(start), blended_spec(spec, th), rec.sigma, opts);
            rec.iterations = res.iterations;
            rec.halvings = res.halvings;
            rec.residuals = res.residual_history;
            rec.converged = true;
            u = std::move(res.u);
        } catch (const NumericalError& e) {
            rec.message = e.what();
        }
        std::ostringstream os;
        os << format_stage(rec) << " iterations=" << rec.iterations << " halvings=" << rec.halvings;
        for (std::size_t i = 0; i < rec.residuals.size(); ++i) {
            os << (i ? "," : " residuals=") << rec.residuals[i];
        }
        if (!rec.converged) {
            os << " FAILED: " << rec.message;
        }
        emit(os.str());
        report.stages.push_back(std::move(rec));
        return report.stages.back().converged;
    };

    // Walk a ladder; a failing step is bisected up to max_bisections times.
    // Returns false when the bisection limit is hit.
    auto climb = [&](const std::string& ladder, double& current, const std::vector<double>& steps,
                     const std::function<bool(double)>& solve_at, const std::function<void(double)>& on_reached) {
        for (std::size_t i = 1; i < steps.size(); ++i) {
            const double target = steps[i];
            double next = target;
            int depth = 0;
            while (current != target) {
                if (solve_at(next)) {
                    current = next;
                    next = target;
                } else {
                    if (++depth > schedule.max_bisections) {
                        emit("ladder " + ladder + " exhausted bisections");
                        return false;
                    }
                    ++report.bisections;
                    next = current + 0.5 * (next - current);
                }
            }
            if (on_reached) {
                on_reached(current);
            }
        }
        return true;
    };

    auto exhausted = [&](const std::string& what) {
        report.converged = false;
        report.failure = what;
        report.solution = u;
        report.theta_reached = theta;
        throw ScheduleExhausted(what, report);
    };

    if (!attempt("t", t, theta, eps)) {
        exhausted("initial horosphere stage failed");
    }
    if (!climb(
            "t", t, schedule.t_steps, [&](double v) { return attempt("t", v, theta, eps); }, {})) {
        exhausted("t ladder exhausted");
    }
    if (!climb(
            "theta", theta, schedule.theta_steps, [&](double v) { return attempt("theta", t, v, eps); }, {})) {
        emit("theta ladder stalled; continuing at theta=" + std::to_string(theta));
    }
    report.epsilon_levels.push_back({eps, u.values});
    if (!climb(
            "epsilon", eps, schedule.epsilon_steps, [&](double v) { return attempt("epsilon", t, theta, v); },
            [&](double reached) { report.epsilon_levels.push_back({reached, u.values}); })) {
        exhausted("epsilon ladder exhausted");
    }

    report.solution = u;
    report.theta_reached = theta;
    report.final_residual = report.stages.back().residuals.back();
    report.converged = true;
    return report;
}

}  // namespace plateau
