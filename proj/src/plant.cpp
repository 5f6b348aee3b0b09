#include "fic/plant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fic {

void validate(const PlantConfig& cfg) {
    if (!(cfg.inertia > 0.0) || !std::isfinite(cfg.inertia))
        throw std::invalid_argument("inertia must be positive");
    if (!(cfg.K_env >= 0.0) || !std::isfinite(cfg.K_env))
        throw std::invalid_argument("K_env must be non-negative");
    if (!(cfg.D_env >= 0.0) || !std::isfinite(cfg.D_env))
        throw std::invalid_argument("D_env must be non-negative");
    if (cfg.contact_dir != 1 && cfg.contact_dir != -1)
        throw std::invalid_argument("contact_dir must be +1 or -1");
    if (!std::isfinite(cfg.contact_pos) || !std::isfinite(cfg.env_rest))
        throw std::invalid_argument("contact_pos and env_rest must be finite");
}

double penetration(const PlantConfig& cfg, double x) {
    if (cfg.coupling == Coupling::Welded) return 1.0;
    return cfg.contact_dir * (x - cfg.contact_pos);
}

EnvTorque env_torque(const PlantConfig& cfg, double x, double x_dot) {
    if (cfg.coupling == Coupling::Welded)
        return {-cfg.K_env * (x - cfg.env_rest) - cfg.D_env * x_dot, true};

    const double depth = penetration(cfg, x);
    if (!(depth > 0.0)) return {0.0, false};
    const double inward = cfg.contact_dir * x_dot;
    double push = cfg.K_env * depth;
    if (inward > 0.0) push += cfg.D_env * inward;
    push = std::max(push, 0.0);
    return {-cfg.contact_dir * push, true};
}

Derivative plant_derivative(const PlantConfig& cfg, const PlantState& s, double tau_ctrl) {
    const EnvTorque env = env_torque(cfg, s.x, s.x_dot);
    return {s.x_dot, (tau_ctrl + env.torque) / cfg.inertia};
}

}  // namespace fic
