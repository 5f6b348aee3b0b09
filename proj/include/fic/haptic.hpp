#pragma once

#include "fic/profiles.hpp"

namespace fic {

/// Force-feedback search for the desired position. Positions are measured
/// from the reference pose the exploration started at.
struct HapticState {
    double x_d_h = 0.0;      // adapted desired position (rad)
    double F_prev = 0.0;     // interaction torque measured at the previous tick (N·m)
    double sigma = 0.01;     // search resolution
    double F_d = 0.0;        // desired interaction torque (N·m)
    double x_d = 0.0;        // expected contact displacement (rad)
    double force_tol = 1e-3; // relative band around F_d treated as "reached"

    bool operator==(const HapticState&) const = default;
};

/// One control tick of the exploration loop. `displacement` is the current
/// position relative to the reference pose; it selects the feed-forward
/// branch while |displacement| <= |x_d|.
/// Throws std::invalid_argument for K0 <= 0, sigma <= 0, or F_d == 0 when
/// the proportional branch is taken.
HapticState haptic_update(HapticState s, const ForceProfileParams& p, double F_measured,
                          double displacement);

}  // namespace fic
