#include "fic/selfcheck.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "fic/controller.hpp"
#include "fic/profiles.hpp"
#include "fic/sim.hpp"

namespace fic {

namespace {

std::string fmt(const char* f, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Composite Simpson with an even panel count; kinks land on panel edges
// only by accident, so n is large.
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

const ForceProfileParams kParams{100.0, 15.0, 0.10, 0.11, 20.0};

CheckResult odd_and_bounded() {
    double worst = 0.0;
    bool bounded = true;
    for (int i = 0; i <= 3000; ++i) {
        const double x = 1e-4 * i;
        worst = std::max(worst, std::abs(force_profile(kParams, -x) + force_profile(kParams, x)));
        bounded = bounded && std::abs(force_profile(kParams, x)) <= kParams.F_max();
    }
    return {"force profile odd and bounded", worst == 0.0 && bounded, fmt("max |f(-x)+f(x)| = %g", worst)};
}

CheckResult continuity() {
    double worst = 0.0;
    const double eps = 1e-12;
    for (double edge : {kParams.x_tilde_0(), kParams.x_tilde_b()})
        worst = std::max(worst, std::abs(force_profile(kParams, edge + eps) -
                                         force_profile(kParams, edge - eps)));
    // A continuous profile moves at most its steepest slope times the gap.
    const double steepest = std::max(kParams.K0(), kParams.dF() / kParams.b());
    const double allowed = 2.0 * eps * steepest * 1.01;
    return {"force profile continuous at branch edges", worst <= allowed,
            fmt("jump across +-1e-12 rad: %g", worst) + fmt(" (slope bound %g)", allowed)};
}

CheckResult energy_integral() {
    double worst = 0.0;
    for (double x : {0.03, 0.10, 0.105, 0.2, 0.3}) {
        const double q = simpson([](double u) { return force_profile(kParams, u); }, 0.0, x, 200000);
        worst = std::max(worst, std::abs(q - energy_profile(kParams, x)) / energy_profile(kParams, x));
    }
    return {"energy profile matches quadrature", worst < 1e-6, fmt("max relative error %g", worst)};
}

CheckResult inversion() {
    double worst = 0.0;
    for (double xm = 0.101; xm < 0.5; xm += 0.0037) {
        const double a = antagonist_force(kParams, xm, xm);
        worst = std::max(worst, std::abs(a - force_profile(kParams, xm)) / std::abs(a));
    }
    return {"antagonist force continuous at inversion", worst < 1e-12, fmt("max relative jump %g", worst)};
}

CheckResult conservation() {
    ExperimentSpec e;
    e.name = "selfcheck_free";
    e.plant.K_env = 0.0;
    e.plant.D_env = 0.0;
    e.haptic = false;
    e.controller = ControllerMode::Spring;
    e.x0 = 0.04;
    e.x_d = -0.04;
    const SimTrace tr = run_simulation(e);
    double lo = tr.rows.front().V, hi = lo;
    for (const TraceRow& r : tr.rows) {
        lo = std::min(lo, r.V);
        hi = std::max(hi, r.V);
    }
    return {"energy conserved without environment", hi - lo < 1e-6, fmt("V drift %g J", hi - lo)};
}

CheckResult welded_oracle() {
    ExperimentSpec e;
    e.name = "selfcheck_welded";
    e.controller = ControllerMode::Off;
    e.haptic = false;
    e.x0 = 0.1;
    e.plant.env_rest = 0.0;
    e.sim.t_end = 5.0;
    const SimTrace tr = run_simulation(e);
    const double L = e.plant.inertia, D = e.plant.D_env, K = e.plant.K_env;
    const double disc = std::sqrt(D * D - 4.0 * L * K);
    const double r1 = (-D + disc) / (2.0 * L), r2 = (-D - disc) / (2.0 * L);
    const double A = e.x0 * r2 / (r2 - r1), B = -e.x0 * r1 / (r2 - r1);
    double worst = 0.0;
    for (const TraceRow& r : tr.rows)
        worst = std::max(worst, std::abs(r.x - (A * std::exp(r1 * r.t) + B * std::exp(r2 * r.t))));
    return {"welded plant matches closed form", worst < 1e-6, fmt("max |x - x_exact| = %g rad", worst)};
}

}  // namespace

std::vector<CheckResult> run_self_checks() {
    return {odd_and_bounded(), continuity(), energy_integral(), inversion(), conservation(),
            welded_oracle()};
}

}  // namespace fic
