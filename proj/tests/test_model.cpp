#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "qda/model.hpp"

using namespace qda;

TEST_SUITE_BEGIN("model");

TEST_CASE("constructor rejects invalid parameters") {
    CHECK_THROWS_AS(SiteSystem(0, 0, 1, -1, 1), std::invalid_argument);
    CHECK_THROWS_AS(SiteSystem(0, 0, 1, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(SiteSystem(0, 0, 1, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(SiteSystem(0, 0, NAN, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(SiteSystem(0, 0, 1, 1, INFINITY), std::invalid_argument);
    // Degenerate excited manifold: no coupling and no site splitting.
    CHECK_THROWS_AS(SiteSystem(3.0, 3.0, 0.0, 1, 1), std::invalid_argument);
    CHECK_NOTHROW(SiteSystem(2.0, -2.0, 0.0, 1, 1));
}

TEST_CASE("dressed frame at a generic point") {
    // j = 3, site splitting 4: gap = sqrt(36 + 16) = sqrt(52).
    const DressedFrame f = diagonalize(SiteSystem(2.0, -2.0, 3.0, 1.0, 1.0));
    CHECK(f.omega_gap == doctest::Approx(7.211102550927978).epsilon(1e-15));
    CHECK(f.u_plus == doctest::Approx(0.881674598767944).epsilon(1e-14));
    CHECK(f.u_minus == doctest::Approx(0.471857925532024).epsilon(1e-14));
    CHECK(f.omega_bar == doctest::Approx(0.0));
    CHECK(f.omega_plus == doctest::Approx(0.5 * f.omega_gap));
    CHECK(f.omega_minus == doctest::Approx(-0.5 * f.omega_gap));
    CHECK(f.omega_plus >= f.omega_minus);
}

TEST_CASE("mixing amplitudes are orthonormal and rates split exactly") {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> uj(-20.0, 20.0);
    std::uniform_real_distribution<double> ud(-10.0, 10.0);
    std::uniform_real_distribution<double> ug(0.5, 2.0);
    for (int i = 0; i < 500; ++i) {
        double j = uj(rng);
        const double d = ud(rng);
        if (j == 0.0 && d == 0.0) j = 1.0;
        const double ga = ug(rng), gb = ug(rng);
        const DressedFrame f =
            diagonalize(SiteSystem(0.5 * d, -0.5 * d, j, ga, gb));

        CHECK(f.u_plus * f.u_plus + f.u_minus * f.u_minus ==
              doctest::Approx(1.0).epsilon(1e-14));
        CHECK(f.v_plus == f.u_minus);
        CHECK(f.v_minus == -f.u_plus);
        CHECK(f.gamma_a_plus + f.gamma_a_minus ==
              doctest::Approx(ga).epsilon(1e-12));
        CHECK(f.gamma_b_plus + f.gamma_b_minus ==
              doctest::Approx(gb).epsilon(1e-12));
        CHECK(f.gamma_pp == doctest::Approx(f.gamma_a_plus + f.gamma_b_plus));
        CHECK(f.gamma_mm == doctest::Approx(f.gamma_a_minus + f.gamma_b_minus));
        CHECK(f.omega_gap >= std::abs(d));
    }
}

TEST_CASE("frame depends on the coupling magnitude only") {
    const SiteSystem pos(1.0, -1.0, 2.5, 1.0, 0.9);
    const SiteSystem neg(1.0, -1.0, -2.5, 1.0, 0.9);
    const DressedFrame fp = diagonalize(pos), fn = diagonalize(neg);
    CHECK(fp.u_plus == fn.u_plus);
    CHECK(fp.u_minus == fn.u_minus);
    CHECK(fp.omega_gap == fn.omega_gap);
    CHECK(fp.gamma_pp == fn.gamma_pp);
    CHECK(fp.gamma_cross == fn.gamma_cross);
}

TEST_CASE("decoupled limit keeps the sites as eigenstates") {
    const DressedFrame above = diagonalize(SiteSystem(2.0, -2.0, 0.0, 1, 1));
    CHECK(above.u_plus == 1.0);
    CHECK(above.u_minus == 0.0);
    CHECK(above.omega_gap == doctest::Approx(4.0));

    const DressedFrame below = diagonalize(SiteSystem(-2.0, 2.0, 0.0, 1, 1));
    CHECK(below.u_plus == 0.0);
    CHECK(below.u_minus == 1.0);
}

TEST_CASE("degenerate sites mix equally") {
    const DressedFrame f = diagonalize(SiteSystem(0.0, 0.0, 0.7, 1.0, 1.0));
    CHECK(f.u_plus == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(f.u_minus == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(f.omega_gap == doctest::Approx(1.4));
    CHECK(f.gamma_cross == 0.0); // equal rates: no dressed cross-damping
}

TEST_CASE("cross damping vanishes exactly when the rates match") {
    const DressedFrame equal = diagonalize(SiteSystem(1.0, -1.0, 2.0, 1.3, 1.3));
    CHECK(equal.gamma_cross == 0.0);
    const DressedFrame unequal =
        diagonalize(SiteSystem(1.0, -1.0, 2.0, 1.3, 0.7));
    CHECK(std::abs(unequal.gamma_cross) > 0.0);
    CHECK(unequal.gamma_cross ==
          doctest::Approx((1.3 - 0.7) * unequal.u_plus * unequal.u_minus));
}

TEST_CASE("laser detunings differ by the gap") {
    const DressedFrame f = diagonalize(SiteSystem(0, 0, 0.5, 1, 1));
    const LaserDetunings d = laser_detunings(f, f.omega_minus + 0.3);
    CHECK(d.minus == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(d.plus == d.minus - f.omega_gap); // exact by construction
}

TEST_CASE("near-equal-rate regime predicate") {
    CHECK(SiteSystem(0, 0, 1, 1.0, 1.0).qda_regime());
    CHECK(SiteSystem(0, 0, 1, 1.0, 1.2).qda_regime());
    CHECK_FALSE(SiteSystem(0, 0, 1, 1.0, 2.0).qda_regime());
    CHECK(SiteSystem(0, 0, 1, 1.0, 2.0).qda_regime(0.5));
}

TEST_SUITE_END();
