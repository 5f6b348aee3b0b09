#include "fic/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fic {

namespace {

bool finite_all(std::initializer_list<double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double v) { return std::isfinite(v); });
}

double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

}  // namespace

ForceProfileParams::ForceProfileParams(double K0, double F_max, double x_tilde_0,
                                       double x_tilde_b, double S)
    : K0_(K0), F_max_(F_max), x_tilde_0_(x_tilde_0), x_tilde_b_(x_tilde_b), S_(S) {
    if (!finite_all({K0, F_max, x_tilde_0, x_tilde_b, S}))
        throw std::invalid_argument("profile parameters must be finite");
    if (!(K0 > 0.0)) throw std::invalid_argument("K0 must be positive");
    if (!(F_max > 0.0)) throw std::invalid_argument("F_max must be positive");
    if (!(S > 0.0)) throw std::invalid_argument("S must be positive");
    if (!(x_tilde_0 > 0.0)) throw std::invalid_argument("x_tilde_0 must be positive");
    if (!(x_tilde_b > x_tilde_0))
        throw std::invalid_argument("x_tilde_b must be greater than x_tilde_0");
    // Tiny slack so that x_tilde_0 = F_max / K0 computed in floating point passes.
    if (K0 * x_tilde_0 > F_max * (1.0 + 1e-12))
        throw std::invalid_argument("K0 * x_tilde_0 must not exceed F_max (got " +
                                    std::to_string(K0 * x_tilde_0) + " > " +
                                    std::to_string(F_max) + ")");
}

double default_x_tilde_0(double K0, double F_max) {
    if (K0 > 0.0 && K0 * kDefaultXTilde0 > F_max) return F_max / K0;
    return kDefaultXTilde0;
}

double force_profile(const ForceProfileParams& p, double x_tilde) {
    const double a = std::abs(x_tilde);
    const double s = sign_of(x_tilde);
    if (a < p.x_tilde_0()) return p.K0() * x_tilde;
    if (a < p.x_tilde_b()) {
        const double dF = std::max(p.dF(), 0.0);
        return s * (dF * -std::expm1(-(a - p.x_tilde_0()) / p.b()) + p.K0() * p.x_tilde_0());
    }
    return s * p.F_max();
}

double energy_profile(const ForceProfileParams& p, double x_tilde) {
    const double a = std::abs(x_tilde);
    const double x0 = p.x_tilde_0();
    const double linear = 0.5 * p.K0() * x0 * x0;
    if (a < x0) return 0.5 * p.K0() * a * a;

    const double dF = std::max(p.dF(), 0.0);
    const double b = p.b();
    auto middle = [&](double u) {
        return linear + p.F_max() * (u - x0) + b * dF * std::expm1(-(u - x0) / b);
    };
    if (a < p.x_tilde_b()) return middle(a);
    return middle(p.x_tilde_b()) + p.F_max() * (a - p.x_tilde_b());
}

double antagonist_slope(const ForceProfileParams& p, double x_max) {
    if (!(x_max > 0.0)) throw std::invalid_argument("x_max must be positive");
    if (x_max <= p.x_tilde_0()) return 4.0 * energy_profile(p, x_max) / (x_max * x_max);
    return 2.0 * force_profile(p, x_max) / x_max;
}

double antagonist_force(const ForceProfileParams& p, double x_tilde, double x_max) {
    const double k = antagonist_slope(p, x_max);
    return sign_of(x_tilde) * k * (std::abs(x_tilde) - 0.5 * x_max);
}

double antagonist_energy(const ForceProfileParams& p, double x_tilde, double x_max) {
    const double k = antagonist_slope(p, x_max);
    const double d = std::abs(x_tilde) - 0.5 * x_max;
    return 0.5 * k * d * d;
}

}  // namespace fic
