#include "cap_oracle.hpp"
#include "plateau/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace plateau;
using testing_oracle::CapFormula;

namespace {

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

Mat diag2(double a, double b) {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("build_grid places the boundary ring on the profile") {
    const auto topo = build_grid(Domain::disk(1.0, 8, 16));
    CHECK(topo.node_count - topo.interior_count == 16);
    for (int p = topo.interior_count; p < topo.node_count; ++p) {
        CHECK(topo.position(p).norm() == doctest::Approx(1.0).epsilon(1e-14));
    }
    for (int p = 0; p < topo.interior_count; ++p) {
        CHECK(topo.position(p).norm() < 1.0);
    }
}

TEST_CASE("build_grid on the star domain") {
    const auto topo = build_grid(Domain::star(1.0, 0.3, 5, 8, 16));
    const Vec x = topo.position(topo.interior_count);  // phi = 0 on the boundary ring
    CHECK(x(0) == doctest::Approx(1.3));
    CHECK(std::abs(x(1)) < 1e-14);
}

TEST_CASE("build_grid on an interval") {
    const auto topo = build_grid(Domain::interval(0.8660254, 8));
    CHECK(topo.dim == 1);
    CHECK(topo.node_count == 17);
    CHECK(topo.position(topo.node_count - 2)(0) == doctest::Approx(-0.8660254));
    CHECK(topo.position(topo.node_count - 1)(0) == doctest::Approx(0.8660254));
}

TEST_CASE("domain invariants") {
    CHECK_THROWS_AS(Domain::disk(1.0, 4, 8).validate(), InvalidDomain);
    CHECK_THROWS_AS(Domain::disk(1.0, 8, 15).validate(), InvalidDomain);
    CHECK_THROWS_AS(Domain::star(1.0, 1.2, 3, 8, 16).validate(), InvalidDomain);
    CHECK_NOTHROW(Domain::disk(1.0, 8, 16).validate());
}

TEST_CASE("differentiate a linear function") {
    const auto topo = build_grid(Domain::disk(1.0, 16, 32));
    std::vector<double> u(topo.node_count);
    for (int p = 0; p < topo.node_count; ++p) {
        u[p] = topo.position(p)(0);
    }
    const auto d = differentiate(topo, u);
    for (int p = 0; p < topo.node_count; ++p) {
        CHECK((d.gradient(p) - vec2(1.0, 0.0)).norm() < 1e-10);
        CHECK(max_abs(d.hessian(p)) < 1e-9);
    }
}

TEST_CASE("differentiate reproduces quadratics") {
    const Mat exact = [] {
        Mat m(2, 2);
        m << 2.0, 0.6, 0.6, -1.4;
        return m;
    }();
    for (int n_r : {8, 16, 32}) {
        const auto domain = Domain::disk(1.3, n_r, 2 * n_r);
        const auto topo = build_grid(domain);
        std::vector<double> u(topo.node_count);
        for (int p = 0; p < topo.node_count; ++p) {
            const Vec x = topo.position(p);
            u[p] = 0.5 * x.dot(exact * x) + 0.3 * x(0) - 0.1 * x(1) + 2.0;
        }
        const auto d = differentiate(topo, u);
        double err = 0.0;
        for (int p = 0; p < topo.node_count; ++p) {
            err = std::max(err, max_abs(d.hessian(p) - exact));
        }
        CHECK(err < 1e-8);
    }
}

TEST_CASE("differentiate quadratics on a mapped grid converges") {
    const Mat exact = [] {
        Mat m(2, 2);
        m << 2.0, 0.6, 0.6, -1.4;
        return m;
    }();
    std::vector<double> hess_err;
    std::vector<double> grad_err;
    for (int n_r : {16, 32, 64}) {
        const auto topo = build_grid(Domain::star(1.0, 0.2, 3, n_r, 2 * n_r));
        std::vector<double> u(topo.node_count);
        for (int p = 0; p < topo.node_count; ++p) {
            const Vec x = topo.position(p);
            u[p] = 0.5 * x.dot(exact * x) + 0.3 * x(0);
        }
        const auto d = differentiate(topo, u);
        double eh = 0.0;
        double eg = 0.0;
        for (int p = 0; p < topo.node_count; ++p) {
            Vec g = exact * topo.position(p);
            g(0) += 0.3;
            eh = std::max(eh, max_abs(d.hessian(p) - exact));
            eg = std::max(eg, (d.gradient(p) - g).cwiseAbs().maxCoeff());
        }
        hess_err.push_back(eh);
        grad_err.push_back(eg);
    }
    CHECK(std::log2(hess_err[1] / hess_err[2]) >= 0.9);
    CHECK(std::log2(grad_err[1] / grad_err[2]) >= 1.8);
}

TEST_CASE("differentiate the cap converges at second order") {
    const CapFormula cap{1.0, 0.5};
    std::vector<double> errs;
    for (int n_r : {16, 32, 64}) {
        const auto topo = build_grid(Domain::disk(0.6, n_r, 2 * n_r));
        const auto u = testing_oracle::sample(topo, cap);
        const auto d = differentiate(topo, u);
        double err = 0.0;
        for (int p = 0; p < topo.interior_count; ++p) {
            const Vec x = topo.position(p);
            err = std::max(err, max_abs(d.hessian(p) - cap.hessian(x)));
            err = std::max(err, (d.gradient(p) - cap.gradient(x)).cwiseAbs().maxCoeff());
        }
        errs.push_back(err);
    }
    CHECK(std::log2(errs[0] / errs[1]) >= 1.8);
    CHECK(std::log2(errs[1] / errs[2]) >= 1.8);
}

TEST_CASE("cap derivatives at x = (0.6, 0)") {
    const CapFormula cap{1.0, 0.5};
    const Vec x = vec2(0.6, 0.0);
    CHECK(cap.value(x) == doctest::Approx(0.3));
    CHECK(max_abs(cap.hessian(x) - diag2(-1.953125, -1.25)) < 1e-14);
    double best = 1.0;
    for (int n_r : {16, 64}) {
        const auto topo = build_grid(Domain::disk(std::sqrt(0.75), n_r, 2 * n_r));
        const auto u = testing_oracle::sample(topo, cap);
        const auto d = differentiate(topo, u);
        int nearest = 0;
        for (int p = 0; p < topo.interior_count; ++p) {
            if ((topo.position(p) - x).norm() < (topo.position(nearest) - x).norm()) {
                nearest = p;
            }
        }
        const Vec xn = topo.position(nearest);
        const double err = max_abs(d.hessian(nearest) - cap.hessian(xn));
        CHECK(err < best);
        best = err;
    }
    CHECK(best < 1e-3);
}

TEST_CASE("shape matrices of the horosphere") {
    const auto s = shape_matrices(0.05, Vec::Zero(2), Mat::Zero(2, 2));
    CHECK(max_abs(s.gamma - Mat::Identity(2, 2)) == 0.0);
    CHECK(max_abs(s.shape_e) == 0.0);
    CHECK(max_abs(s.shape - Mat::Identity(2, 2)) < 1e-15);
}

TEST_CASE("shape matrices at a cap point") {
    const auto s = shape_matrices(0.3, vec2(-0.75, 0.0), diag2(-1.953125, -1.25));
    CHECK(s.w == doctest::Approx(1.25));
    CHECK(max_abs(s.gamma - diag2(0.8, 1.0)) < 1e-14);
    CHECK(max_abs(s.shape_e - diag2(-1.0, -1.0)) < 1e-14);
    CHECK(max_abs(s.shape - diag2(0.5, 0.5)) < 1e-14);
}

TEST_CASE("principal curvatures") {
    const auto k1 = principal_curvatures(Mat::Identity(2, 2));
    CHECK(k1(0) == 1.0);
    CHECK(k1(1) == 1.0);
    const auto k2 = principal_curvatures(diag2(0.5, 0.5));
    CHECK(k2(0) == doctest::Approx(0.5));
    const auto k3 = principal_curvatures(Mat(2.0 * Mat::Identity(2, 2)), Mat(4.0 * Mat::Identity(2, 2)));
    CHECK(k3(0) == doctest::Approx(0.5));
    CHECK(k3(1) == doctest::Approx(0.5));
    const auto k4 = principal_curvatures(diag2(3.0, -1.0));
    CHECK(k4(0) == -1.0);
    CHECK(k4(1) == 3.0);
}

TEST_CASE("pointwise identities at random convex points") {
    std::uint64_t state = 12345;
    auto next = [&] {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(state >> 11) / 9007199254740992.0;
    };
    for (int trial = 0; trial < 100; ++trial) {
        const double u = 0.05 + next();
        const Vec du = vec2(2.0 * next() - 1.0, 2.0 * next() - 1.0) * 2.0;
        Mat d2u(2, 2);
        d2u << -next(), 0.3 * (next() - 0.5), 0.0, -next();
        d2u(1, 0) = d2u(0, 1);
        const auto g = point_geometry(vec2(0.1, 0.2), u, du, d2u);
        const Mat id = Mat::Identity(2, 2);
        CHECK(max_abs(g.gamma * g.gamma * (id + du * du.transpose()) - id) <= 1e-10);
        for (int i = 0; i < 2; ++i) {
            CHECK(std::abs(g.kappa(i) - (u * g.kappa_e(i) + g.nu)) <= 1e-10);
        }
        const auto t = surface_tensors(u, du, d2u);
        const Vec k2 = principal_curvatures(t.second_form, t.metric);
        CHECK((k2 - g.kappa).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("intrinsic hessian of 1/u at the cap centre") {
    const Vec du = Vec::Zero(2);
    const Mat d2u = -Mat::Identity(2, 2);
    const double u = 0.5;
    const auto t = surface_tensors(u, du, d2u);
    const Vec dphi = -du / (u * u);
    const Mat d2phi = -d2u / (u * u) + 2.0 * du * du.transpose() / (u * u * u);
    const Mat hess = intrinsic_hessian(dphi, d2phi, t);
    CHECK(max_abs(hess - 4.0 * Mat::Identity(2, 2)) < 1e-12);
    const double nu = 1.0 / t.w;
    const Mat rhs = (t.metric - nu * t.second_form) / u;
    CHECK(max_abs(rhs - 4.0 * Mat::Identity(2, 2)) < 1e-12);
    CHECK(max_abs(intrinsic_hessian(Vec::Zero(2), Mat::Zero(2, 2), t)) == 0.0);
}

TEST_CASE("intrinsic hessian residual of 1/u converges on the cap") {
    const CapFormula cap{1.0, 0.5};
    std::vector<double> errs;
    for (int n_r : {32, 64, 128}) {
        const auto topo = build_grid(Domain::disk(0.6, n_r, 2 * n_r));
        const auto u = testing_oracle::sample(topo, cap);
        std::vector<double> inv(u.size());
        for (std::size_t p = 0; p < u.size(); ++p) {
            inv[p] = 1.0 / u[p];
        }
        const auto hess = intrinsic_hessian_field(topo, inv, u);
        double err = 0.0;
        for (int p = 0; p < topo.interior_count; ++p) {
            const Vec x = topo.position(p);
            const auto t = surface_tensors(u[p], cap.gradient(x), cap.hessian(x));
            const Mat rhs = (t.metric - t.second_form / t.w) / u[p];
            err = std::max(err, max_abs(hess[p] - rhs) / rhs.norm());
        }
        errs.push_back(err);
    }
    CHECK(std::log2(errs[0] / errs[1]) >= 1.8);
    CHECK(std::log2(errs[1] / errs[2]) >= 1.8);
}

TEST_CASE("intrinsic hessian of 1/u on a horosphere vanishes") {
    const auto topo = build_grid(Domain::disk(1.0, 16, 32));
    const std::vector<double> u(topo.node_count, 0.2);
    const std::vector<double> inv(topo.node_count, 5.0);
    const auto hess = intrinsic_hessian_field(topo, inv, u);
    for (int p = 0; p < topo.interior_count; ++p) {
        CHECK(max_abs(hess[p]) < 1e-10);
    }
}

TEST_CASE("radial profiles") {
    const auto e = RadialProfile::ellipse(1.0, 0.5);
    CHECK(e(0.0) == doctest::Approx(1.0));
    CHECK(e(std::numbers::pi / 2) == doctest::Approx(0.5));
    const auto f = RadialProfile::fourier({1.0, 0.1}, {0.0, 0.2});
    const auto s = f.sample(0.3);
    CHECK(s.value == doctest::Approx(1.0 + 0.1 * std::cos(0.3) + 0.2 * std::sin(0.3)));
    CHECK(s.first == doctest::Approx(-0.1 * std::sin(0.3) + 0.2 * std::cos(0.3)));
    CHECK(RadialProfile::circle(2.0).is_circle());
}

namespace {

// p = x^3 + 2 x^2 y - y^3 + x y + x^4 / 4
double quartic(const Vec& x) {
    const double a = x(0);
    const double b = x(1);
    return a * a * a + 2.0 * a * a * b - b * b * b + a * b + 0.25 * a * a * a * a;
}

Vec quartic_gradient(const Vec& x) {
    const double a = x(0);
    const double b = x(1);
    return vec2(3.0 * a * a + 4.0 * a * b + b + a * a * a, 2.0 * a * a - 3.0 * b * b + a);
}

Mat quartic_hessian(const Vec& x) {
    const double a = x(0);
    const double b = x(1);
    Mat h(2, 2);
    h << 6.0 * a + 4.0 * b + 3.0 * a * a, 4.0 * a + 1.0, 4.0 * a + 1.0, -6.0 * b;
    return h;
}

double fourth_order_error(const Domain& d) {
    const auto topo = build_grid(d);
    std::vector<double> u(topo.node_count);
    for (int p = 0; p < topo.node_count; ++p) {
        u[p] = quartic(topo.position(p));
    }
    const auto jets = differentiate_fourth(topo, u);
    double err = 0.0;
    for (int p = 0; p < topo.node_count; ++p) {
        const Vec x = topo.position(p);
        err = std::max(err, (jets.gradient(p) - quartic_gradient(x)).cwiseAbs().maxCoeff());
        err = std::max(err, max_abs(jets.hessian(p) - quartic_hessian(x)));
    }
    return err;
}

}  // namespace

TEST_CASE("fourth-order jets are exact for quartics on a disk") {
    for (int n : {8, 16}) {
        CHECK(fourth_order_error(Domain::disk(1.3, n, 2 * n)) < 1e-8);
    }
}

TEST_CASE("fourth-order jets converge on a mapped star") {
    const double e16 = fourth_order_error(Domain::star(1.0, 0.2, 3, 16, 32));
    const double e32 = fourth_order_error(Domain::star(1.0, 0.2, 3, 32, 64));
    const double e64 = fourth_order_error(Domain::star(1.0, 0.2, 3, 64, 128));
    INFO(e16 << " " << e32 << " " << e64);
    CHECK(std::log2(e16 / e32) >= 2.5);
    CHECK(std::log2(e32 / e64) >= 2.5);
}

TEST_CASE("fourth-order jets on an interval") {
    const auto topo = build_grid(Domain::interval(0.8, 8));
    std::vector<double> u(topo.node_count);
    for (int p = 0; p < topo.node_count; ++p) {
        const double x = topo.position(p)(0);
        u[p] = x * x * x * x - 2.0 * x * x * x + x;
    }
    const auto jets = differentiate_fourth(topo, u);
    for (int p = 0; p < topo.node_count; ++p) {
        const double x = topo.position(p)(0);
        CHECK(jets.gradient(p)(0) == doctest::Approx(4.0 * x * x * x - 6.0 * x * x + 1.0).epsilon(1e-9));
        CHECK(jets.hessian(p)(0, 0) == doctest::Approx(12.0 * x * x - 12.0 * x).epsilon(1e-9));
    }
}
