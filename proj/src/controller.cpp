#include "fic/controller.hpp"

#include <algorithm>
#include <cmath>

namespace fic {

namespace {

int side_of(double x) { return x < 0.0 ? -1 : +1; }

int classify(double rate) {
    if (rate > kVelocityDeadband) return +1;
    if (rate < -kVelocityDeadband) return -1;
    return 0;
}

}  // namespace

double commanded_torque(const ControllerState& s, const ForceProfileParams& p, double x_tilde) {
    if (s.phase == Phase::Converging && s.x_max > kXMaxFloor) {
        // The clamp only bites on rounding at x_max and on integrator stages
        // that sample just past x_max before that event is localized.
        const double u = std::abs(x_tilde);
        const double f = std::clamp(antagonist_force(p, u, s.x_max), -p.F_max(), p.F_max());
        return -s.side * f;
    }
    return -force_profile(p, x_tilde);
}

ControllerState reset_at_pose(const ControllerState& s, double x_tilde) {
    ControllerState r = s;
    r.phase = Phase::Diverging;
    r.x_max = 0.0;
    r.side = side_of(x_tilde);
    r.motion = 0;
    return r;
}

ControllerState begin_convergence(const ControllerState& s, double x_tilde) {
    ControllerState r = s;
    r.phase = Phase::Converging;
    r.x_max = std::abs(x_tilde);
    return r;
}

ControllerState resume_divergence(const ControllerState& s, double x_tilde) {
    ControllerState r = s;
    r.phase = Phase::Diverging;
    r.x_max = std::abs(x_tilde);
    return r;
}

double away_rate(const ControllerState& s, double x_tilde_dot) { return s.side * x_tilde_dot; }

ControllerStep compute_torque(ControllerState s, const ForceProfileParams& p, double x_tilde,
                              double x_tilde_dot) {
    const double a = std::abs(x_tilde);
    if (x_tilde != 0.0 && side_of(x_tilde) != s.side) s = reset_at_pose(s, x_tilde);

    const double rate = away_rate(s, x_tilde_dot);
    const int m = classify(rate);
    if (s.phase == Phase::Diverging) {
        // The apex: the last genuine motion was outward and it has stopped.
        if (s.motion > 0 && rate <= 0.0 && a > kXMaxFloor)
            s = begin_convergence(s, x_tilde);
        else
            s.x_max = std::max(s.x_max, a);
    } else if (a > s.x_max || (s.motion < 0 && m > 0)) {
        s = resume_divergence(s, x_tilde);
    }
    if (m != 0) s.motion = m;

    const double h = commanded_torque(s, p, x_tilde);
    s.last_h_e = h;
    return {h, s};
}

double energy_offset(const ForceProfileParams& p, double x_max) {
    const double e_k = energy_profile(p, x_max);
    const double dE_A = 2.0 * antagonist_energy(p, x_max, x_max) - e_k;
    return 0.5 * (e_k - dE_A);
}

LyapunovRecord lyapunov_value(const ControllerState& s, const ForceProfileParams& p,
                              double x_tilde, double x_tilde_dot, double inertia) {
    const double kinetic = 0.5 * inertia * x_tilde_dot * x_tilde_dot;
    if (s.phase == Phase::Diverging || s.x_max <= kXMaxFloor)
        return {kinetic + energy_profile(p, x_tilde), 0.0, LyapunovBranch::V_K};

    const double e_k = energy_profile(p, s.x_max);
    const double e_end = antagonist_energy(p, s.x_max, s.x_max);
    const double dE_A = 2.0 * e_end - e_k;
    const double E_C = 0.5 * (e_k - dE_A);
    const double u = std::abs(x_tilde);
    const double e_aa = antagonist_energy(p, u, s.x_max);
    double V = kinetic + E_C;
    if (u >= 0.5 * s.x_max)
        V += e_aa;
    else
        V -= e_aa * (e_k - dE_A) / (e_k + dE_A);
    return {V, E_C, LyapunovBranch::V_AA};
}

}  // namespace fic
