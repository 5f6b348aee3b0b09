#pragma once

// Nonlinear spring profile of the fractal impedance controller, its energy
// integral and the antagonist (convergence) spring.

namespace fic {

/// Shape of the divergence spring. Construction validates; b and dF are
/// always derived from the stored primaries.
class ForceProfileParams {
public:
    /// Throws std::invalid_argument naming the violated invariant.
    ForceProfileParams(double K0, double F_max, double x_tilde_0, double x_tilde_b, double S);

    double K0() const { return K0_; }
    double F_max() const { return F_max_; }
    double x_tilde_0() const { return x_tilde_0_; }
    double x_tilde_b() const { return x_tilde_b_; }
    double S() const { return S_; }

    /// Characteristic length of the saturating exponential (rad).
    double b() const { return (x_tilde_b_ - x_tilde_0_) / S_; }
    /// Torque left above the linear region, F_max - K0 * x_tilde_0.
    double dF() const { return F_max_ - K0_ * x_tilde_0_; }

    bool operator==(const ForceProfileParams&) const = default;

private:
    double K0_;
    double F_max_;
    double x_tilde_0_;
    double x_tilde_b_;
    double S_;
};

/// Defaults used when a configuration leaves a field unset.
inline constexpr double kDefaultFMax = 15.0;
inline constexpr double kDefaultXTilde0 = 0.10;
inline constexpr double kDefaultXTildeB = 0.11;
inline constexpr double kDefaultS = 20.0;

/// Largest linear-region boundary compatible with K0 and F_max, capped at the
/// default 0.10 rad. Stiff springs reach F_max before 0.10 rad.
double default_x_tilde_0(double K0, double F_max);

/// Spring torque F_K(x~): linear, then exponential approach to F_max, then flat.
double force_profile(const ForceProfileParams& p, double x_tilde);

/// E_K(x~) = integral of force_profile from 0 to |x~| (closed form).
double energy_profile(const ForceProfileParams& p, double x_tilde);

/// Slope of the antagonist spring for a recorded maximum x_max > 0.
/// Energy-matched (4 E_K / x_max^2) when x_max <= x_tilde_0, force-matched
/// (2 F_K / x_max) otherwise.
double antagonist_slope(const ForceProfileParams& p, double x_max);

/// F_AA on magnitudes: slope * (|x~| - x_max/2), signed by the side of x~.
/// Throws std::invalid_argument if x_max <= 0.
double antagonist_force(const ForceProfileParams& p, double x_tilde, double x_max);

/// Energy stored in the antagonist spring, 0.5 * slope * (|x~| - x_max/2)^2.
/// Zero at the midpoint and equal at both ends of the episode.
double antagonist_energy(const ForceProfileParams& p, double x_tilde, double x_max);

}  // namespace fic
