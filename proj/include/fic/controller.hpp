#pragma once

#include "fic/profiles.hpp"

namespace fic {

enum class Phase { Diverging, Converging };

/// Below this recorded maximum an episode is treated as already converged.
inline constexpr double kXMaxFloor = 1e-12;
/// Velocities inside this band never count as a direction on their own.
inline constexpr double kVelocityDeadband = 1e-10;

struct ControllerState {
    Phase phase = Phase::Diverging;
    double x_max = 0.0;   // |x~| at the switch (Converging) or running max (Diverging)
    int side = +1;        // sign of x~ for the current episode
    double last_h_e = 0.0;
    // Sign of the last velocity outside the dead band, relative to `side`:
    // +1 moving away from the desired pose, -1 moving back, 0 none yet.
    int motion = 0;

    bool operator==(const ControllerState&) const = default;
};

struct ControllerStep {
    double torque;
    ControllerState state;
};

/// Torque for a frozen phase: -F_K in divergence, -F_AA in convergence.
double commanded_torque(const ControllerState& s, const ForceProfileParams& p, double x_tilde);

/// x~ crossed (or sits on the other side of) the desired pose: new episode.
ControllerState reset_at_pose(const ControllerState& s, double x_tilde);
/// Divergence ends: record x_max = |x~| and freeze the antagonist spring.
ControllerState begin_convergence(const ControllerState& s, double x_tilde);
/// Convergence aborted by a push past x_max or a reversal away from the pose.
ControllerState resume_divergence(const ControllerState& s, double x_tilde);

/// Velocity component pointing away from the desired pose for this episode.
double away_rate(const ControllerState& s, double x_tilde_dot);

/// Discrete-time update: applies every transition implied by (x~, dx~/dt)
/// relative to the previous call, then returns the torque. The event-driven
/// simulator uses the same transitions at localized event times.
ControllerStep compute_torque(ControllerState s, const ForceProfileParams& p, double x_tilde,
                              double x_tilde_dot);

enum class LyapunovBranch { V_K, V_AA };

struct LyapunovRecord {
    double V;
    double E_C;
    LyapunovBranch branch;
};

/// Energy offset of a convergence episode started at x_max.
/// E_C = (E_K - dE_A) / 2 with dE_A = 2 E_AA(x_max) - E_K.
double energy_offset(const ForceProfileParams& p, double x_max);

/// Stored energy candidate. V_K = kinetic + E_K while diverging. While
/// converging, V_AA = kinetic + E_C + E_AA on the far half and
/// kinetic + E_C - lambda * E_AA on the near half, with
/// lambda = (E_K - dE_A) / (E_K + dE_A), so V_AA(x_max) = E_K(x_max) and
/// V_AA(0) = 0 at rest.
LyapunovRecord lyapunov_value(const ControllerState& s, const ForceProfileParams& p,
                              double x_tilde, double x_tilde_dot, double inertia);

}  // namespace fic
