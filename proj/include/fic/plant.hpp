#pragma once

namespace fic {

enum class Coupling { Welded, Contact };

struct PlantConfig {
    double inertia = 10.0;   // kg·m^2
    double K_env = 100.0;    // N·m/rad
    double D_env = 189.7;    // N·m·s/rad
    Coupling coupling = Coupling::Welded;
    double contact_pos = 0.0;  // hard-stop surface (rad), Contact only
    int contact_dir = +1;      // +1: the stop blocks motion toward +x
    double env_rest = 0.0;     // spring rest position (rad), Welded only

    bool operator==(const PlantConfig&) const = default;
};

/// Throws std::invalid_argument naming the violated invariant.
void validate(const PlantConfig& cfg);

struct PlantState {
    double x = 0.0;
    double x_dot = 0.0;
    bool in_contact = false;
    double F_env = 0.0;
};

struct EnvTorque {
    double torque;  // torque applied by the environment on the body
    bool in_contact;
};

/// Welded: linear spring-damper about env_rest. Contact: one-sided stop with
/// damping only while moving into it and a push-only clamp.
EnvTorque env_torque(const PlantConfig& cfg, double x, double x_dot);

/// Penetration depth into the stop (positive inside). Welded: always +1.
double penetration(const PlantConfig& cfg, double x);

struct Derivative {
    double x_dot;
    double x_ddot;
};

Derivative plant_derivative(const PlantConfig& cfg, const PlantState& s, double tau_ctrl);

}  // namespace fic
