#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "mcindex/potential.hpp"

using namespace mcindex;

namespace {

// Chart coordinates of an explicit ambient configuration (must have zero
// barycenter already).
Vec chart_of(const MassSystem& sys, const Chart& chart, const Vec& ambient) {
    return to_chart(sys, chart, ambient);
}

Vec equilateral_coords(const MassSystem& sys, const Chart& chart, double scale = 1.0) {
    // Unit-side equilateral triangle centered at the barycenter.
    Vec q(6);
    q << 0.0, std::sqrt(3.0) / 3.0,
        -0.5, -std::sqrt(3.0) / 6.0,
        0.5, -std::sqrt(3.0) / 6.0;
    return chart_of(sys, chart, scale * q);
}

Vec random_collision_free(const MassSystem& sys, const Chart& chart, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    for (;;) {
        Vec q(sys.chart_dim());
        for (int i = 0; i < q.size(); ++i) q[i] = g(rng);
        if (min_mutual_distance(sys, chart, q) > 0.2) return q;
    }
}

} // namespace

TEST_CASE("two-body potential: unit separation, unit masses, alpha=1") {
    const auto sys = MassSystem::make(2, 2, Vec::Constant(2, 1.0), 1.0);
    const Chart chart = build_chart(sys);
    Vec amb(4);
    amb << 0.5, 0.0, -0.5, 0.0;  // separation 1, zero barycenter
    const Vec q = chart_of(sys, chart, amb);
    CHECK(potential_value(sys, chart, q) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("equilateral triangle with unit mass norm has U(s0) = 3 at alpha=1") {
    const auto sys = MassSystem::make(3, 2, Vec::Constant(3, 1.0), 1.0);
    const Chart chart = build_chart(sys);
    Vec s = equilateral_coords(sys, chart);
    CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-12));  // I = side^2 = 1
    CHECK(potential_value(sys, chart, s) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("homogeneity of U, grad U, D2U") {
    const auto sys = MassSystem::make(3, 2, (Vec(3) << 1.0, 2.0, 3.0).finished(), 0.7);
    const Chart chart = build_chart(sys);
    std::mt19937_64 rng(5);
    const Vec q = random_collision_free(sys, chart, rng);
    const double a = sys.alpha;
    CHECK(potential_value(sys, chart, 2.0 * q) ==
          doctest::Approx(std::pow(2.0, -a) * potential_value(sys, chart, q)).epsilon(1e-10));
    CHECK((potential_grad(sys, chart, 2.0 * q) -
           std::pow(2.0, -a - 1.0) * potential_grad(sys, chart, q))
              .norm() < 1e-10);
    CHECK((potential_hess(sys, chart, 2.0 * q) -
           std::pow(2.0, -a - 2.0) * potential_hess(sys, chart, q))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
}

TEST_CASE("Euler identity and gradient homogeneity identity") {
    const auto sys = MassSystem::make(4, 3, (Vec(4) << 1.0, 0.5, 2.0, 1.5).finished(), 1.2);
    const Chart chart = build_chart(sys);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const Vec q = random_collision_free(sys, chart, rng);
        const double u = potential_value(sys, chart, q);
        const Vec g = potential_grad(sys, chart, q);
        CHECK(g.dot(q) == doctest::Approx(-sys.alpha * u).epsilon(1e-10));
        const Mat H = potential_hess(sys, chart, q);
        CHECK((H * q + (sys.alpha + 1.0) * g).norm() < 1e-8 * std::max(1.0, g.norm()));
    }
}

TEST_CASE("finite-difference check of gradient and Hessian") {
    const auto sys = MassSystem::make(3, 2, Vec::Constant(3, 1.0), 1.0);
    const Chart chart = build_chart(sys);
    std::mt19937_64 rng(23);
    const Vec q = random_collision_free(sys, chart, rng);
    const double h = 1e-5;

    const Vec g = potential_grad(sys, chart, q);
    const Mat H = potential_hess(sys, chart, q);
    std::normal_distribution<double> gg;
    for (int trial = 0; trial < 5; ++trial) {
        Vec v(q.size());
        for (int i = 0; i < v.size(); ++i) v[i] = gg(rng);
        v.normalize();
        const double df = (potential_value(sys, chart, q + h * v) -
                           potential_value(sys, chart, q - h * v)) /
                          (2.0 * h);
        CHECK(df == doctest::Approx(g.dot(v)).epsilon(1e-6));
        const Vec dg = (potential_grad(sys, chart, q + h * v) -
                        potential_grad(sys, chart, q - h * v)) /
                       (2.0 * h);
        CHECK((H * v - dg).norm() < 1e-5);
    }
}

TEST_CASE("two-body radial Hessian eigenvalue alpha(alpha+1)U") {
    // 1-D reduction oracle: along the separation axis the second
    // derivative of r -> m1 m2 r_12^{-alpha} in the radial chart
    // direction equals alpha(alpha+1) U at the unit-norm configuration.
    const auto sys = MassSystem::make(2, 2, Vec::Constant(2, 1.0), 1.0);
    const Chart chart = build_chart(sys);
    Vec amb(4);
    const double sep = std::sqrt(2.0);  // |q|_M = 1
    amb << sep / 2.0, 0.0, -sep / 2.0, 0.0;
    const Vec s = chart_of(sys, chart, amb);
    CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const double u = potential_value(sys, chart, s);
    const Mat H = potential_hess(sys, chart, s);
    const Vec radial = s / s.norm();
    CHECK(radial.dot(H * radial) ==
          doctest::Approx(sys.alpha * (sys.alpha + 1.0) * u).epsilon(1e-10));
}

TEST_CASE("central configuration: equilateral equal masses") {
    const auto sys = MassSystem::make(3, 2, Vec::Constant(3, 1.0), 1.0);
    const Chart chart = build_chart(sys);
    const Vec guess = equilateral_coords(sys, chart, 1.1);
    const auto cc = find_central_configuration(sys, chart, guess);
    CHECK(cc.residual < 1e-10);
    CHECK(cc.u_value == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(cc.s0.norm() == doctest::Approx(1.0).epsilon(1e-10));

    // Central configuration equation in chart coordinates.
    const Vec g = potential_grad(sys, chart, cc.s0);
    CHECK((g + sys.alpha * cc.u_value * cc.s0).norm() < 1e-10);
}

TEST_CASE("central configuration: Euler collinear (1, m, 1) via quintic oracle") {
    // For the symmetric ordering the Euler quintic for (m1,m2,m3)=(1,1,1),
    // 2u^5+5u^4+4u^3-4u^2-5u-2 = 0, has the root u = r23/r12 = 1.
    auto quintic = [](double u) {
        return 2 * std::pow(u, 5) + 5 * std::pow(u, 4) + 4 * std::pow(u, 3) -
               4 * u * u - 5 * u - 2;
    };
    double lo = 0.5, hi = 2.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (quintic(lo) * quintic(mid) <= 0 ? hi : lo) = mid;
    }
    const double root = 0.5 * (lo + hi);
    CHECK(root == doctest::Approx(1.0).epsilon(1e-10));

    const auto sys = MassSystem::make(3, 2, Vec::Constant(3, 1.0), 1.0);
    const Chart chart = build_chart(sys);
    Vec amb(6);
    amb << -1.0, 0.0, 0.0, 0.0, 1.0, 0.0;
    const auto cc = find_central_configuration(sys, chart, to_chart(sys, chart, amb));
    CHECK(cc.residual < 1e-10);
    // Equal spacing (= the quintic root 1) in the converged configuration.
    const Mat pos = particle_positions(sys, chart, cc.s0);
    const double r12 = (pos.col(0) - pos.col(1)).norm();
    const double r23 = (pos.col(1) - pos.col(2)).norm();
    CHECK(r23 / r12 == doctest::Approx(root).epsilon(1e-8));
}

TEST_CASE("central configuration solver rejects collision-ray guesses") {
    const auto sys = MassSystem::make(3, 2, Vec::Constant(3, 1.0), 1.0);
    const Chart chart = build_chart(sys);
    Vec amb(6);
    amb << 1.0, 0.0, 1.0, 0.0, -2.0, 0.0;  // bodies 1 and 2 coincide
    CHECK_THROWS_AS(find_central_configuration(sys, chart, to_chart(sys, chart, amb)),
                    CollisionError);
}

TEST_CASE("hess_U_tilde annihilates s0 and matches finite differences of U~") {
    const auto sys = MassSystem::make(3, 2, Vec::Constant(3, 1.0), 1.0);
    const Chart chart = build_chart(sys);
    const auto cc = find_central_configuration(sys, chart, equilateral_coords(sys, chart));
    const Mat Ht = hess_U_tilde(sys, chart, cc.s0);
    CHECK((Ht - Ht.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((Ht * cc.s0).norm() < 1e-9);

    // Finite differences of x -> |x|^alpha U(x).
    auto u_tilde = [&](const Vec& x) {
        return std::pow(x.norm(), sys.alpha) * potential_value(sys, chart, x);
    };
    const double h = 1e-5;
    const int N = sys.chart_dim();
    Mat fd(N, N);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            Vec ei = Vec::Zero(N), ej = Vec::Zero(N);
            ei[i] = h;
            ej[j] = h;
            fd(i, j) = (u_tilde(cc.s0 + ei + ej) - u_tilde(cc.s0 + ei - ej) -
                        u_tilde(cc.s0 - ei + ej) + u_tilde(cc.s0 - ei - ej)) /
                       (4.0 * h * h);
        }
    }
    CHECK((fd - Ht).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("two-body mu1 against the 1-D reduction") {
    // n=2: chart is 2-dimensional (radial + angular).  D2U~ has the
    // radial direction in its kernel; the angular eigenvalue is
    // alpha*(2-alpha)... computed here directly from the closed form
    // U(s) = m1 m2 (|s| mu^{-1/2})^{-alpha} with mu the reduced mass.
    const double alpha = 1.0;
    const auto sys = MassSystem::make(2, 2, (Vec(2) << 2.0, 3.0).finished(), alpha);
    const Chart chart = build_chart(sys);
    Vec amb(4);
    amb << 0.3, 0.0, -0.2, 0.0;
    const auto cc = find_central_configuration(sys, chart, to_chart(sys, chart, amb));
    // For two bodies every (collision-free) unit configuration is central;
    // U is constant on the sphere up to rotation, so D2U~ should vanish
    // identically on the 2-dimensional chart.
    const Mat Ht = hess_U_tilde(sys, chart, cc.s0);
    CHECK(Ht.cwiseAbs().maxCoeff() < 1e-9);
    CHECK(cc.kernel_dim == 2);
}

TEST_CASE("[BS] verdicts for the collinear family and equilateral") {
    // The transverse (bending) eigenvalue of D2U~ for masses (1,m,1) with
    // the middle mass m is -(7/2)sqrt(2) for every m (closed form; also
    // confirmed by direct constrained second differences of U on the
    // ellipsoid), so the margin mu1 + U(s0)/8 changes sign at m = 55/4.
    const auto mk = [](double m) {
        const auto sys = MassSystem::make(3, 2, (Vec(3) << 1.0, m, 1.0).finished(), 1.0);
        const Chart chart = build_chart(sys);
        Vec amb(6);
        amb << -1.0, 0.0, 0.0, 0.0, 1.0, 0.0;
        const auto cc = find_central_configuration(sys, chart, to_chart(sys, chart, amb));
        return std::make_pair(cc, check_bs(cc, sys.alpha));
    };
    CHECK(mk(16.0).second.holds);
    CHECK_FALSE(mk(10.0).second.holds);
    CHECK_FALSE(mk(1.0).second.holds);

    const auto [cc10, bs10] = mk(10.0);
    CHECK(cc10.mu1 == doctest::Approx(-3.5 * std::sqrt(2.0)).epsilon(1e-9));
    const auto [cc_t, bs_t] = mk(55.0 / 4.0);
    CHECK(bs_t.margin == doctest::Approx(0.0).epsilon(1e-8));

    const auto sys = MassSystem::make(3, 2, Vec::Constant(3, 1.0), 1.0);
    const Chart chart = build_chart(sys);
    const auto cc = find_central_configuration(sys, chart, equilateral_coords(sys, chart));
    const auto bs = check_bs(cc, sys.alpha);
    CHECK(bs.holds);
    CHECK(cc.mu1 == doctest::Approx(0.0).epsilon(1e-8));  // rotational zero mode is the bottom
}

TEST_CASE("bs verdict invariant under particle relabeling") {
    for (double m : {3.0, 8.0}) {
        const auto sys1 = MassSystem::make(3, 2, (Vec(3) << 1.0, m, 1.0).finished(), 1.0);
        const auto sys2 = MassSystem::make(3, 2, (Vec(3) << m, 1.0, 1.0).finished(), 1.0);
        const Chart c1 = build_chart(sys1), c2 = build_chart(sys2);
        Vec a1(6), a2(6);
        a1 << -1, 0, 0, 0, 1, 0;  // heavy mass in the middle
        a2 << 0, 0, -1, 0, 1, 0;
        const auto cc1 = find_central_configuration(sys1, c1, to_chart(sys1, c1, a1));
        const auto cc2 = find_central_configuration(sys2, c2, to_chart(sys2, c2, a2));
        CHECK(check_bs(cc1, 1.0).holds == check_bs(cc2, 1.0).holds);
        CHECK(cc1.bs_margin == doctest::Approx(cc2.bs_margin).epsilon(1e-7));
    }
}

TEST_CASE("cc record round-trip") {
    const auto sys = MassSystem::make(3, 2, Vec::Constant(3, 1.0), 1.0);
    const Chart chart = build_chart(sys);
    const auto cc = find_central_configuration(sys, chart, equilateral_coords(sys, chart));
    const std::string rec = cc_to_record(sys, chart, cc);
    MassSystem sys2;
    Chart chart2;
    const auto cc2 = cc_from_record(rec, &sys2, &chart2);
    CHECK(sys2.n == 3);
    CHECK(cc2.u_value == doctest::Approx(cc.u_value).epsilon(1e-12));
    CHECK(cc2.residual < 1e-10);
}
