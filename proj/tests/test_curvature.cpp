#include "plateau/curvature.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace plateau;

namespace {

Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) {
        v(i++) = x;
    }
    return v;
}

std::vector<CurvatureSpec> family(int n) {
    std::vector<CurvatureSpec> out;
    for (int k = 1; k <= n; ++k) {
        out.push_back(CurvatureSpec::power_mean(n, k));
    }
    for (int l = 0; l < n; ++l) {
        out.push_back(CurvatureSpec::quotient(n, l));
    }
    out.push_back(CurvatureSpec::blend(0.3, CurvatureSpec::mean(n)));
    out.push_back(CurvatureSpec::dual(CurvatureSpec::mean(n)));
    return out;
}

Vec random_cone_point(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> d(0.2, 3.0);
    Vec k(n);
    for (int i = 0; i < n; ++i) {
        k(i) = d(rng);
    }
    return k;
}

Mat random_spd(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Mat q = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            q(i, j) = d(rng);
        }
    }
    const Eigen::HouseholderQR<Mat> qr(q);
    const Mat orth = qr.householderQ();
    Vec lambda(n);
    for (int i = 0; i < n; ++i) {
        lambda(i) = 0.5 + i + 0.3 * (d(rng) + 1.0);
    }
    return orth * lambda.asDiagonal() * orth.transpose();
}

}  // namespace

TEST_CASE("every f is normalized") {
    for (int n : {2, 3, 4}) {
        for (const auto& f : family(n)) {
            CHECK(eval_f(f, Vec::Ones(n)).value == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("H_2^{1/2} at (1, 4)") {
    const auto r = eval_f(CurvatureSpec::gauss(2), vec({1.0, 4.0}));
    CHECK(r.value == doctest::Approx(2.0));
    CHECK(r.gradient(0) == doctest::Approx(1.0));
    CHECK(r.gradient(1) == doctest::Approx(0.25));
    CHECK(r.gradient.dot(vec({1.0, 4.0})) == doctest::Approx(2.0));
}

TEST_CASE("quotient n = 2, l = 1 is the harmonic mean") {
    const auto q = CurvatureSpec::quotient(2, 1);
    CHECK(eval_f(q, vec({1.0, 3.0})).value == doctest::Approx(1.5));
    CHECK(dual_quotient_closed_form(q, vec({1.0, 3.0})) == doctest::Approx(2.0));
    CHECK(eval_f(dual_f(q), vec({1.0, 3.0})).value == doctest::Approx(2.0));
}

TEST_CASE("dual examples") {
    CHECK(eval_f(dual_f(CurvatureSpec::mean(2)), vec({2.0, 2.0})).value == doctest::Approx(2.0));
    CHECK(eval_f(dual_f(CurvatureSpec::gauss(2)), vec({2.0, 0.5})).value == doctest::Approx(1.0));
}

TEST_CASE("quotient duals match the closed form") {
    std::mt19937_64 rng(7);
    for (int n : {2, 3, 4}) {
        for (int l = 0; l < n; ++l) {
            const auto q = CurvatureSpec::quotient(n, l);
            for (int s = 0; s < 20; ++s) {
                const Vec k = random_cone_point(rng, n);
                CHECK(eval_f(dual_f(q), k).value ==
                      doctest::Approx(dual_quotient_closed_form(q, k)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("dual is an involution") {
    std::mt19937_64 rng(11);
    for (int n : {2, 3}) {
        for (const auto& f : family(n)) {
            const auto ff = dual_f(dual_f(f));
            for (int s = 0; s < 20; ++s) {
                const Vec k = random_cone_point(rng, n);
                CHECK(std::abs(eval_f(ff, k).value - eval_f(f, k).value) <= 1e-12);
            }
        }
    }
}

TEST_CASE("gradient matches central differences") {
    std::mt19937_64 rng(3);
    for (int n : {2, 3}) {
        for (const auto& f : family(n)) {
            double worst = 0.0;
            for (int s = 0; s < 100; ++s) {
                const Vec k = random_cone_point(rng, n);
                const auto r = eval_f(f, k);
                Vec fd(n);
                for (int i = 0; i < n; ++i) {
                    const double h = 1e-5 * k(i);
                    Vec kp = k;
                    Vec km = k;
                    kp(i) += h;
                    km(i) -= h;
                    fd(i) = (eval_f(f, kp).value - eval_f(f, km).value) / (2.0 * h);
                }
                worst = std::max(worst, (fd - r.gradient).norm() / r.gradient.norm());
            }
            INFO(f.name());
            CHECK(worst <= 1e-6);
        }
    }
}

TEST_CASE("matrix derivative matches finite differences") {
    std::mt19937_64 rng(5);
    for (int n : {2, 3}) {
        for (const auto& f : family(n)) {
            for (int s = 0; s < 20; ++s) {
                const Mat a = random_spd(rng, n);
                const auto d = matrix_derivative(f, a);
                Mat fd = Mat::Zero(n, n);
                const double h = 1e-5;
                for (int i = 0; i < n; ++i) {
                    for (int j = i; j < n; ++j) {
                        Mat e = Mat::Zero(n, n);
                        e(i, j) = 1.0;
                        e(j, i) = 1.0;
                        const double df = (matrix_derivative(f, Mat(a + h * e)).value -
                                           matrix_derivative(f, Mat(a - h * e)).value) /
                                          (2.0 * h);
                        // symmetric perturbation moves both entries
                        fd(i, j) = i == j ? df : 0.5 * df;
                        fd(j, i) = fd(i, j);
                    }
                }
                INFO(f.name());
                CHECK((fd - d.derivative).cwiseAbs().maxCoeff() <= 1e-6 * d.derivative.norm());
            }
        }
    }
}

TEST_CASE("trace identities of F^{ij}") {
    std::mt19937_64 rng(9);
    for (const auto& f : family(3)) {
        for (int s = 0; s < 20; ++s) {
            const Mat a = random_spd(rng, 3);
            const auto d = matrix_derivative(f, a);
            CHECK((d.derivative.cwiseProduct(a)).sum() == doctest::Approx(d.value).epsilon(1e-10));
            const auto g = eval_f(f, d.eigenvalues).gradient;
            const double lhs = (d.derivative.cwiseProduct(a * a)).sum();
            const double rhs = g.dot(d.eigenvalues.cwiseProduct(d.eigenvalues));
            CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
        }
    }
}

TEST_CASE("matrix derivative at umbilic points") {
    const auto d = matrix_derivative(CurvatureSpec::mean(2), Mat::Identity(2, 2));
    CHECK(d.value == doctest::Approx(1.0));
    CHECK((d.derivative - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
    const auto g = matrix_derivative(CurvatureSpec::gauss(2), Mat(0.5 * Mat::Identity(2, 2)));
    CHECK(g.value == doctest::Approx(0.5));
    CHECK((g.derivative - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
    Mat a = Mat::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = 4.0;
    const auto t = matrix_derivative(CurvatureSpec::gauss(2), a);
    CHECK(t.value == doctest::Approx(2.0));
    CHECK(t.derivative.cwiseProduct(a).sum() == doctest::Approx(2.0));
}

TEST_CASE("structure check") {
    CHECK(structure_check(CurvatureSpec::mean(2), 1000, 1).violations.empty());
    for (const auto& f : family(3)) {
        INFO(f.name());
        CHECK(structure_check(f, 500, 2).violations.empty());
    }
    const auto blend = CurvatureSpec::blend(0.5, CurvatureSpec::mean(2));
    CHECK(eval_f(blend, vec({3.0, 6.0})).value == doctest::Approx(3.0 * eval_f(blend, vec({1.0, 2.0})).value));
    const auto g = structure_check(CurvatureSpec::gauss(2), 10, 1);
    CHECK(g.boundary_value < 2e-3);
    CHECK(g.vanishes_on_boundary);
}

TEST_CASE("domain violations") {
    CHECK_THROWS_AS(eval_f(CurvatureSpec::mean(2), vec({1.0, 0.0})), DomainViolation);
    CHECK_THROWS_AS(eval_f(CurvatureSpec::gauss(2), vec({-1.0, 2.0})), DomainViolation);
    CHECK_THROWS_AS(eval_f(CurvatureSpec::mean(2), vec({1.0, std::nan("")})), DomainViolation);
}

TEST_CASE("elementary symmetric polynomials") {
    const Vec k = vec({1.0, 2.0, 3.0});
    CHECK(elementary_symmetric(k, 0) == 1.0);
    CHECK(elementary_symmetric(k, 1) == 6.0);
    CHECK(elementary_symmetric(k, 2) == 11.0);
    CHECK(elementary_symmetric(k, 3) == 6.0);
    CHECK(normalized_symmetric(k, 2) == doctest::Approx(11.0 / 3.0));
}

TEST_CASE("parse_curvature round trips") {
    for (const char* text : {"mean", "gauss", "power_mean:2", "quotient:2,1", "blend:0.5,mean", "dual:mean"}) {
        const auto f = parse_curvature(text, 2);
        CHECK(parse_curvature(f.name(), 2).name() == f.name());
    }
    CHECK(parse_curvature("gauss", 2).is_gauss());
    CHECK(parse_curvature("power_mean:2", 2).is_gauss());
    CHECK_THROWS_AS(parse_curvature("quotient:3,1", 2), std::invalid_argument);
    CHECK_THROWS_AS(parse_curvature("power_mean:0", 2), std::invalid_argument);
    CHECK_THROWS_AS(parse_curvature("median", 2), std::invalid_argument);
    CHECK_THROWS_AS(parse_curvature("blend:1.5,mean", 2), std::invalid_argument);
}
