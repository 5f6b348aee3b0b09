#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fic/haptic.hpp"
#include "oracles.hpp"

using fic::HapticState;

namespace {

const fic::ForceProfileParams P{100.0, 15.0, 0.10, 0.11, 20.0};

HapticState make(double F_d, double x_d) {
    HapticState s;
    s.F_d = F_d;
    s.x_d = x_d;
    return s;
}

}  // namespace

TEST_CASE("feed-forward before contact") {
    HapticState s = make(5.0, 0.5);
    s = fic::haptic_update(s, P, 0.0, 0.3);
    CHECK(s.x_d_h == doctest::Approx(0.55));
    CHECK(s.F_prev == 0.0);
}

TEST_CASE("proportional step in contact") {
    HapticState s = make(5.0, 0.5);
    s.x_d_h = 0.55;
    s.F_prev = 4.0;
    const HapticState n = fic::haptic_update(s, P, 4.2, 0.52);
    CHECK(n.x_d_h - 0.55 == doctest::Approx(1.0e-4).epsilon(1e-9));
    CHECK(n.F_prev == 4.2);
}

TEST_CASE("holds when the previous torque matches the target") {
    HapticState s = make(5.0, 0.5);
    s.x_d_h = 0.5731;
    s.F_prev = 5.0;
    CHECK(fic::haptic_update(s, P, 5.0, 0.52).x_d_h == 0.5731);
    s.F_prev = 5.0 * (1.0 + 0.5e-3);  // inside the relative band
    CHECK(fic::haptic_update(s, P, 5.0, 0.52).x_d_h == 0.5731);
    s.F_prev = 5.0 * (1.0 + 2e-3);
    CHECK(fic::haptic_update(s, P, 5.0, 0.52).x_d_h < 0.5731);
}

TEST_CASE("rejects degenerate inputs") {
    HapticState s = make(0.0, 0.5);
    s.F_prev = 1.0;
    CHECK_THROWS_AS(fic::haptic_update(s, P, 1.0, 0.6), std::invalid_argument);
    CHECK_NOTHROW(fic::haptic_update(s, P, 1.0, 0.4));
    HapticState z = make(5.0, 0.5);
    z.sigma = 0.0;
    CHECK_THROWS_AS(fic::haptic_update(z, P, 1.0, 0.6), std::invalid_argument);
}

TEST_CASE("step direction and size") {
    oracle::Draws d(31);
    for (int trial = 0; trial < 2000; ++trial) {
        const double F_d = d.uniform(0.1, 20.0);
        HapticState s = make(F_d, 0.1);
        s.sigma = d.uniform(1e-3, 0.1);
        s.F_prev = d.uniform(-2.0 * F_d, 3.0 * F_d);
        s.x_d_h = d.uniform(0.0, 1.0);
        const HapticState n = fic::haptic_update(s, P, 0.0, 0.5);
        const double dx = n.x_d_h - s.x_d_h;
        const double step = s.sigma * F_d / P.K0();
        const double err = std::abs(F_d - s.F_prev) / F_d;
        if (err > s.force_tol) {
            REQUIRE((dx > 0) == (F_d > s.F_prev));
        }
        REQUIRE(std::abs(dx) <= step * std::max(1.0, err) * (1.0 + 1e-12));
        if (err <= 1.0) REQUIRE(std::abs(dx) <= step * (1.0 + 1e-12));
    }
}

TEST_CASE("negative targets mirror positive ones") {
    HapticState pos = make(5.0, 0.5), neg = make(-5.0, -0.5);
    pos = fic::haptic_update(pos, P, 0.0, 0.2);
    neg = fic::haptic_update(neg, P, 0.0, -0.2);
    CHECK(neg.x_d_h == -pos.x_d_h);
    pos.F_prev = 3.0;
    neg.F_prev = -3.0;
    CHECK(fic::haptic_update(neg, P, 0.0, -0.6).x_d_h ==
          -fic::haptic_update(pos, P, 0.0, 0.6).x_d_h);
}

TEST_CASE("fixed point once the target is measured") {
    HapticState s = make(5.0, 0.5);
    s.x_d_h = 0.58;
    s.F_prev = 5.0;
    for (int i = 0; i < 100; ++i) s = fic::haptic_update(s, P, 5.0, 0.55);
    CHECK(s.x_d_h == 0.58);
}

TEST_CASE("search against a linear environment stays at or below the target") {
    // Quasi-static loop: body at equilibrium between the controller spring and
    // an environment spring of stiffness K starting at the contact position.
    const double K = 100.0, contact = 0.5;
    HapticState s = make(5.0, contact);
    double T = 0.0;
    double x = 0.0;
    for (int tick = 0; tick < 3000; ++tick) {
        s = fic::haptic_update(s, P, T, x);
        // Equilibrium: K0 (x_d_h - x) = K (x - contact), linear region.
        x = (P.K0() * s.x_d_h + K * contact) / (P.K0() + K);
        if (x < contact) x = s.x_d_h;
        T = x > contact ? K * (x - contact) : 0.0;
        REQUIRE(T <= 5.0 + 1e-12);
        REQUIRE(T <= P.F_max());
    }
    CHECK(T == doctest::Approx(5.0).epsilon(1e-3));
}
