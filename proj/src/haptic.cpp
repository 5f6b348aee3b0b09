#include "fic/haptic.hpp"

#include <cmath>
#include <stdexcept>

namespace fic {

HapticState haptic_update(HapticState s, const ForceProfileParams& p, double F_measured,
                          double displacement) {
    if (!(p.K0() > 0.0)) throw std::invalid_argument("K0 must be positive");
    if (!(s.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");

    const double delta = s.F_d / p.K0();
    const double delta_h = s.sigma * delta;

    if (std::abs(s.F_prev - s.F_d) > s.force_tol * std::abs(s.F_d)) {
        if (std::abs(displacement) <= std::abs(s.x_d)) {
            s.x_d_h = s.x_d + delta;
        } else {
            if (s.F_d == 0.0)
                throw std::invalid_argument("F_d must be non-zero for the proportional update");
            s.x_d_h += (s.F_d - s.F_prev) / s.F_d * delta_h;
        }
    }
    s.F_prev = F_measured;
    return s;
}

}  // namespace fic
