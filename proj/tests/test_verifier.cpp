#include "cap_oracle.hpp"
#include "plateau/verifier.hpp"

#include <doctest.h>

#include <cmath>

using namespace plateau;

TEST_CASE("ball radii") {
    const auto disk = ball_radii(Domain::disk(0.7, 16, 32));
    CHECK(disk.interior == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(std::isinf(disk.exterior));
    const auto ellipse = ball_radii(Domain::ellipse(1.0, 0.5, 16, 32));
    CHECK(ellipse.interior == doctest::Approx(0.25).epsilon(0.02));
    CHECK(std::isinf(ellipse.exterior));
    const auto star = ball_radii(Domain::star(1.0, 0.3, 5, 16, 32));
    CHECK(std::isfinite(star.exterior));
    CHECK(star.exterior > 0.0);
    CHECK(star.interior > 0.0);
    CHECK(star.interior < 0.7);
    const auto interval = ball_radii(Domain::interval(0.6, 16));
    CHECK(interval.interior == doctest::Approx(0.6));
    CHECK(std::isinf(interval.exterior));
}

TEST_CASE("eta on an exact cap is -1/R") {
    const double rho = std::sqrt(0.75);
    const Domain d = Domain::disk(rho, 32, 64);
    const auto topo = build_grid(d);
    const auto cap = testing_oracle::matched_cap(0.5, rho, 0.05);
    const auto s = SolutionSnapshot::make(d, CurvatureSpec::mean(2), 0.5, {testing_oracle::sample(topo, cap), 0.05});
    const auto eta = s.eta();
    for (int p = 0; p < topo.node_count; ++p) {
        if (s.u[p] > 0.1) {
            CHECK(std::abs(eta[p] + 1.0 / cap.R) < 1e-2);
        }
    }
}

TEST_CASE("eta on the horosphere vanishes at sigma = 1") {
    const Domain d = Domain::disk(1.0, 8, 16);
    const auto topo = build_grid(d);
    const auto s = SolutionSnapshot::make(d, CurvatureSpec::mean(2), 1.0, constant_function(topo, 0.05));
    for (double e : s.eta()) {
        CHECK(std::abs(e) < 1e-12);
    }
}

TEST_CASE("compare semantics") {
    CHECK(compare("a", 1.0, Relation::less_equal, 2.0, 0.0).pass);
    CHECK(compare("a", 1.0, Relation::less_equal, 2.0, 0.0).margin == 1.0);
    CHECK_FALSE(compare("a", 2.0, Relation::less_equal, 2.0, 0.0).pass);
    CHECK(compare("a", 2.0, Relation::less_equal, 2.0, 0.5).pass);
    CHECK(compare("a", 3.0, Relation::greater, 2.0, 0.0).pass);
    CHECK_FALSE(compare("a", 1.0, Relation::greater_equal, 2.0, 0.5).pass);
    CHECK_FALSE(compare("a", kInfinity, Relation::less_equal, 2.0, 0.0).pass);
    CHECK_FALSE(compare("a", std::nan(""), Relation::less_equal, 2.0, 0.0).pass);
    CHECK_FALSE(compare("a", 1.0, Relation::less_equal, std::nan(""), 0.0).pass);
    const auto m = measurement("m", 5.0);
    CHECK(m.pass);
    CHECK_FALSE(m.enforced);
    Scorecard card;
    card.add(m);
    card.add(compare("b", 1.0, Relation::less, 0.0, 0.0));
    CHECK_FALSE(card.all_pass());
    CHECK(card.failures().size() == 1);
    CHECK(card.find("b") != nullptr);
    CHECK(card.find("c") == nullptr);
}

TEST_CASE("exterior constant") {
    CHECK(exterior_constant(0.5, 0.01, kInfinity) == 0.0);
    CHECK(exterior_constant(0.6, 0.0, 2.0) == doctest::Approx(0.4));
    CHECK(exterior_constant(0.6, 0.1, 2.0) == doctest::Approx(0.4 + 0.1 * 1.6 / 4.0));
}

TEST_CASE("extrapolation to zero is exact for quadratics") {
    const std::vector<double> eps = {0.4, 0.2, 0.1, 0.05};
    std::vector<std::vector<double>> values;
    for (double e : eps) {
        values.push_back({1.0 + 2.0 * e - 3.0 * e * e, -0.5 + e * e});
    }
    const auto out = extrapolate_to_zero(eps, values, 1e-12);
    CHECK(out[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(-0.5).epsilon(1e-12));
    values[3][0] = values[2][0] + 0.1;
    CHECK_THROWS_AS((void)extrapolate_to_zero(eps, values, 1e-6), ExtrapolationUnstable);
    CHECK_NOTHROW((void)extrapolate_to_zero(eps, values, 1.0));
    CHECK_THROWS_AS((void)extrapolate_to_zero({0.1, 0.05}, {{1.0}, {1.0}}, 0.0), std::invalid_argument);
}

TEST_CASE("boundary angle on the sigma = 0.9 disk") {
    const double sigma = 0.9;
    const Domain d = Domain::disk(std::sqrt(1.0 - sigma * sigma), 32, 64);
    const auto spec = CurvatureSpec::mean(2);
    const auto rep = continuation_solve(d, spec, sigma, ContinuationSchedule::defaults(d, spec));
    REQUIRE(rep.converged);
    const auto res = boundary_angle_check(d, sigma, rep.epsilon_levels, ball_radii(d));
    for (double w : res.extrapolated_w) {
        CHECK(w == doctest::Approx(1.0 / sigma).epsilon(0.02));
    }
    CHECK(res.card.find("boundary_angle.extrapolated_w")->pass);
}

TEST_CASE("kernel norms vanish on an exact cap") {
    const double rho = std::sqrt(0.75);
    double prev = 0.0;
    for (int n : {16, 32}) {
        const Domain d = Domain::disk(rho, n, 2 * n);
        const auto topo = build_grid(d);
        const auto cap = testing_oracle::matched_cap(0.5, rho, 0.01);
        const auto s =
            SolutionSnapshot::make(d, CurvatureSpec::mean(2), 0.5, {testing_oracle::sample(topo, cap), 0.01});
        const auto kn = kernel_norms(s);
        INFO(kn.translation << " " << kn.starshape);
        if (n == 32) {
            CHECK(kn.translation < prev / 3.5);
        }
        prev = kn.translation;
        CHECK(kn.starshape < 0.05);
    }
}
