#include "plateau/kernels.hpp"

#include <cmath>

namespace plateau::kernels {

NodeValue operator_value(const CurvatureSpec& spec, double u, const Vec& du, const Mat& d2u) {
    NodeValue out;
    const auto shape = shape_matrices(u, du, d2u);
    if (!shape.shape.allFinite()) {
        return out;
    }
    const Vec kappa = principal_curvatures(shape.shape);
    out.min_eig = kappa(0);
    if (!(kappa(0) > 0.0)) {
        return out;
    }
    out.value = eval_f(spec, kappa).value;
    out.ok = true;
    return out;
}

NodeLinearization linearize_node(const CurvatureSpec& spec, double u, const Vec& du, const Mat& d2u) {
    NodeLinearization out;
    const auto shape = shape_matrices(u, du, d2u);
    if (!shape.shape.allFinite()) {
        return out;
    }
    const auto eig = symmetric_eigen(shape.shape);
    out.base.min_eig = eig.values(0);
    if (!(eig.values(0) > 0.0)) {
        return out;
    }
    const auto md = matrix_derivative(spec, shape.shape);
    out.base.value = md.value;
    out.base.ok = true;
    out.w = shape.w;
    out.trace_f = md.derivative.trace();
    out.second = (u / shape.w) * shape.gamma * md.derivative * shape.gamma;
    out.zeroth = (md.value - out.trace_f / shape.w) / u;

    const auto n = du.size();
    out.first.resize(n);
    const double step = 1e-6 * (1.0 + du.norm());
    auto central = [&](int s, double h, bool& good) {
        Vec plus = du;
        Vec minus = du;
        plus(s) += h;
        minus(s) -= h;
        const auto gp = operator_value(spec, u, plus, d2u);
        const auto gm = operator_value(spec, u, minus, d2u);
        good = good && gp.ok && gm.ok;
        return (gp.value - gm.value) / (2.0 * h);
    };
    bool good = true;
    for (int s = 0; s < n; ++s) {
        const double coarse = central(s, step, good);
        const double fine = central(s, 0.5 * step, good);
        out.first(s) = (4.0 * fine - coarse) / 3.0;
    }
    out.ok = good;
    return out;
}

namespace {

template <class Fn>
void for_each_node(Exec exec, int count, Fn&& fn) {
    if (exec == Exec::openmp) {
#pragma omp parallel for schedule(static)
        for (int p = 0; p < count; ++p) {
            fn(p);
        }
    } else {
        for (int p = 0; p < count; ++p) {
            fn(p);
        }
    }
}

}  // namespace

void evaluate_values(Exec exec, const CurvatureSpec& spec, std::span<const double> u,
                     const GridDerivatives& jets, int interior_count, std::span<NodeValue> out) {
    for_each_node(exec, interior_count, [&](int p) {
        try {
            out[p] = operator_value(spec, u[p], jets.gradient(p), jets.hessian(p));
        } catch (const std::exception&) {
            out[p] = NodeValue{};
        }
    });
}

void evaluate_linearization(Exec exec, const CurvatureSpec& spec, std::span<const double> u,
                            const GridDerivatives& jets, int interior_count,
                            std::span<NodeLinearization> out) {
    for_each_node(exec, interior_count, [&](int p) {
        try {
            out[p] = linearize_node(spec, u[p], jets.gradient(p), jets.hessian(p));
        } catch (const std::exception&) {
            out[p] = NodeLinearization{};
        }
    });
}

}  // namespace plateau::kernels
