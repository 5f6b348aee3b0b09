#include "fic/sim.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>

namespace fic {

namespace {

constexpr double kDivergenceLimit = 1e6;
constexpr int kMaxEventsPerStep = 64;

int side_of(double x) { return x < 0.0 ? -1 : +1; }

long ratio_or_throw(double num, double den, const char* what) {
    const double r = num / den;
    const long n = std::lround(r);
    if (n < 1 || std::abs(r - static_cast<double>(n)) > 1e-6)
        throw std::invalid_argument(what);
    return n;
}

// x, x_dot, controller work, environment work.
using Vec = std::array<double, 4>;

Vec axpy(const Vec& y, double a, const Vec& k) {
    return {y[0] + a * k[0], y[1] + a * k[1], y[2] + a * k[2], y[3] + a * k[3]};
}

class Simulation {
public:
    explicit Simulation(const ExperimentSpec& exp)
        : exp_(exp), p_(exp.profile), grid_(step_grid(exp.sim)) {
        y_ = {exp.x0, exp.v0, 0.0, 0.0};
        x_ref_ = exp.x0;
        haptic_.sigma = exp.sigma;
        haptic_.F_d = exp.T_d;
        haptic_.x_d = exp.x_d;
        haptic_.force_tol = exp.force_tol;
        haptic_.x_d_h = exp.haptic ? 0.0 : exp.x_d;
        x_d_h_ = x_ref_ + haptic_.x_d_h;
        const double xt = y_[0] - x_d_h_;
        ctrl_ = reset_at_pose(ctrl_, xt);
        settle_after_step();
        in_contact_ = penetration(exp.plant, y_[0]) > 0.0;
    }

    SimTrace run() {
        SimTrace out;
        out.t_end = exp_.sim.t_end;
        out.rows.reserve(static_cast<size_t>(grid_.ticks / grid_.ticks_per_record + 1));
        const double h = exp_.sim.control_dt / static_cast<double>(grid_.substeps);
        for (long k = 0; k < grid_.ticks; ++k) {
            t_ = static_cast<double>(k) * exp_.sim.control_dt;
            control_tick();
            if (k % grid_.ticks_per_record == 0) out.rows.push_back(record());
            for (long j = 0; j < grid_.substeps; ++j) {
                const double t_next = static_cast<double>(k) * exp_.sim.control_dt +
                                      static_cast<double>(j + 1) * h;
                advance_to(t_next);
            }
        }
        diag_.work_ctrl = y_[2];
        diag_.work_env = y_[3];
        diag_.x_final = y_[0];
        diag_.x_dot_final = y_[1];
        out.events = std::move(events_);
        out.diagnostics = diag_;
        return out;
    }

private:
    double x_tilde(const Vec& y) const { return y[0] - x_d_h_; }
    bool fractal() const { return exp_.controller == ControllerMode::Fractal; }

    double torque(const ControllerState& s, double xt) const {
        switch (exp_.controller) {
            case ControllerMode::Fractal: return commanded_torque(s, p_, xt);
            case ControllerMode::Spring: return -force_profile(p_, xt);
            case ControllerMode::Off: return 0.0;
        }
        return 0.0;
    }

    double energy(const ControllerState& s, const Vec& y) const {
        switch (exp_.controller) {
            case ControllerMode::Fractal:
                return lyapunov_value(s, p_, x_tilde(y), y[1], exp_.plant.inertia).V;
            case ControllerMode::Spring:
                return 0.5 * exp_.plant.inertia * y[1] * y[1] + energy_profile(p_, x_tilde(y));
            case ControllerMode::Off: break;
        }
        return 0.5 * exp_.plant.inertia * y[1] * y[1];
    }

    Vec rhs(const Vec& y) {
        const double tau = torque(ctrl_, x_tilde(y));
        const EnvTorque env = env_torque(exp_.plant, y[0], y[1]);
        diag_.max_abs_torque = std::max(diag_.max_abs_torque, std::abs(tau));
        if (exp_.plant.coupling == Coupling::Contact)
            diag_.max_pull = std::max(diag_.max_pull, exp_.plant.contact_dir * env.torque);
        return {y[1], (tau + env.torque) / exp_.plant.inertia, tau * y[1], env.torque * y[1]};
    }

    Vec rk4(const Vec& y, double h) {
        const Vec k1 = rhs(y);
        const Vec k2 = rhs(axpy(y, 0.5 * h, k1));
        const Vec k3 = rhs(axpy(y, 0.5 * h, k2));
        const Vec k4 = rhs(axpy(y, h, k3));
        Vec r;
        for (size_t i = 0; i < r.size(); ++i)
            r[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        return r;
    }

    // Does `kind` fire between the step start y0 and a candidate end y1?
    bool fires(EventKind kind, const Vec& y0, const Vec& y1) const {
        const int sd = ctrl_.side;
        switch (kind) {
            case EventKind::PoseCrossing:
                return sd * x_tilde(y0) >= 0.0 && sd * x_tilde(y1) < 0.0;
            case EventKind::Inversion:
                return ctrl_.motion > 0 && sd * y0[1] > 0.0 && sd * y1[1] <= 0.0;
            case EventKind::PushedPast:
                return ctrl_.x_max - sd * x_tilde(y0) >= 0.0 &&
                       ctrl_.x_max - sd * x_tilde(y1) < 0.0;
            case EventKind::Reversal:
                return ctrl_.motion < 0 && sd * y0[1] <= kVelocityDeadband &&
                       sd * y1[1] > kVelocityDeadband;
            case EventKind::Midpoint: {
                const double half = 0.5 * ctrl_.x_max;
                return sd * x_tilde(y0) > half && sd * x_tilde(y1) <= half;
            }
            case EventKind::ContactMade:
                return penetration(exp_.plant, y0[0]) <= 0.0 &&
                       penetration(exp_.plant, y1[0]) > 0.0;
            case EventKind::ContactLost:
                return penetration(exp_.plant, y0[0]) > 0.0 &&
                       penetration(exp_.plant, y1[0]) <= 0.0;
            case EventKind::ProfileKink:
                for (double edge : {p_.x_tilde_0(), p_.x_tilde_b()})
                    if ((std::abs(x_tilde(y0)) < edge) != (std::abs(x_tilde(y1)) < edge))
                        return true;
                return false;
            case EventKind::ReferenceJump:
                return false;
        }
        return false;
    }

    std::vector<EventKind> armed() const {
        std::vector<EventKind> ks;
        const bool on_profile = exp_.controller == ControllerMode::Spring ||
                                (fractal() && ctrl_.phase == Phase::Diverging);
        if (on_profile) ks.push_back(EventKind::ProfileKink);
        if (fractal()) {
            ks.push_back(EventKind::PoseCrossing);
            if (ctrl_.phase == Phase::Diverging) {
                ks.push_back(EventKind::Inversion);
            } else if (ctrl_.x_max > kXMaxFloor) {
                ks.push_back(EventKind::PushedPast);
                ks.push_back(EventKind::Reversal);
                ks.push_back(EventKind::Midpoint);
            }
        }
        if (exp_.plant.coupling == Coupling::Contact) {
            ks.push_back(EventKind::ContactMade);
            ks.push_back(EventKind::ContactLost);
        }
        return ks;
    }

    void advance_to(double t_target) {
        int n_events = 0;
        while (t_ < t_target) {
            const double h = t_target - t_;
            const Vec y1 = rk4(y_, h);
            guard(y1, t_target);

            std::optional<EventKind> first;
            double first_theta = h;
            if (n_events < kMaxEventsPerStep) {
                for (EventKind k : armed()) {
                    if (!fires(k, y_, y1)) continue;
                    const double theta = localize(k, h);
                    if (!first || theta < first_theta) {
                        first = k;
                        first_theta = theta;
                    }
                }
            }
            if (!first) {
                y_ = y1;
                t_ = t_target;
                ++diag_.accepted_steps;
                settle_after_step();
                break;
            }
            const Vec ye = first_theta >= h ? y1 : rk4(y_, first_theta);
            guard(ye, t_ + first_theta);
            y_ = ye;
            t_ = first_theta >= h ? t_target : t_ + first_theta;
            ++diag_.accepted_steps;
            ++n_events;
            apply(*first);
            settle_after_step();
        }
    }

    // Smallest step (within event_tol) after which `kind` has fired.
    double localize(EventKind kind, double h) {
        double lo = 0.0;
        double hi = h;
        while (hi - lo > exp_.sim.event_tol) {
            const double mid = 0.5 * (lo + hi);
            if (fires(kind, y_, rk4(y_, mid)))
                hi = mid;
            else
                lo = mid;
        }
        return hi;
    }

    void apply(EventKind kind) {
        const double xt = x_tilde(y_);
        const ControllerState before = ctrl_;
        switch (kind) {
            case EventKind::PoseCrossing: ctrl_ = reset_at_pose(ctrl_, xt); break;
            case EventKind::Inversion: ctrl_ = begin_convergence(ctrl_, xt); break;
            case EventKind::PushedPast:
            case EventKind::Reversal: ctrl_ = resume_divergence(ctrl_, xt); break;
            case EventKind::ContactMade: in_contact_ = true; break;
            case EventKind::ContactLost: in_contact_ = false; break;
            case EventKind::ProfileKink: return;
            case EventKind::Midpoint:
            case EventKind::ReferenceJump: break;
        }
        log(kind, before);
    }

    void log(EventKind kind, const ControllerState& before) {
        const double xt = x_tilde(y_);
        events_.push_back({kind, t_, y_[0], xt, y_[1], ctrl_.x_max, torque(before, xt),
                           torque(ctrl_, xt), energy(before, y_), energy(ctrl_, y_), y_[2],
                           y_[3]});
        ++diag_.event_count;
    }

    // Bookkeeping that needs no localization: running maximum, last genuine
    // direction of motion, and a pose crossing that landed exactly on a step end.
    void settle_after_step() {
        const double xt = x_tilde(y_);
        if (xt != 0.0 && side_of(xt) != ctrl_.side) {
            const ControllerState before = ctrl_;
            ctrl_ = reset_at_pose(ctrl_, xt);
            if (fractal() && before.phase == Phase::Converging)
                log(EventKind::PoseCrossing, before);
        }
        if (ctrl_.phase == Phase::Diverging) ctrl_.x_max = std::max(ctrl_.x_max, std::abs(xt));
        const double r = away_rate(ctrl_, y_[1]);
        if (r > kVelocityDeadband) ctrl_.motion = +1;
        if (r < -kVelocityDeadband) ctrl_.motion = -1;
    }

    void control_tick() {
        if (!exp_.haptic) return;
        const EnvTorque env = env_torque(exp_.plant, y_[0], y_[1]);
        haptic_ = haptic_update(haptic_, p_, -env.torque, y_[0] - x_ref_);
        const double moved = x_ref_ + haptic_.x_d_h;
        if (moved == x_d_h_) return;
        x_d_h_ = moved;

        const double xt = x_tilde(y_);
        const ControllerState before = ctrl_;
        if (xt != 0.0 && side_of(xt) != ctrl_.side) {
            ctrl_ = reset_at_pose(ctrl_, xt);
            ctrl_.x_max = std::abs(xt);
        } else if (ctrl_.phase == Phase::Converging && std::abs(xt) > ctrl_.x_max) {
            ctrl_ = resume_divergence(ctrl_, xt);
        }
        settle_after_step();
        if (fractal() && before.phase != ctrl_.phase) log(EventKind::ReferenceJump, before);
    }

    TraceRow record() const {
        const double xt = x_tilde(y_);
        const EnvTorque env = env_torque(exp_.plant, y_[0], y_[1]);
        return {t_,
                y_[0],
                y_[1],
                xt,
                torque(ctrl_, xt),
                env.torque,
                x_d_h_,
                fractal() ? ctrl_.phase : Phase::Diverging,
                ctrl_.x_max,
                energy(ctrl_, y_),
                exp_.plant.coupling == Coupling::Welded || in_contact_};
    }

    void guard(const Vec& y, double t) const {
        if (!std::isfinite(y[0]) || !std::isfinite(y[1]) || std::abs(y[0]) > kDivergenceLimit ||
            std::abs(y[1]) > kDivergenceLimit) {
            std::ostringstream msg;
            msg << "simulation '" << exp_.name << "' diverged at t=" << t << " (x=" << y[0]
                << ", x_dot=" << y[1] << ")";
            throw SimulationDiverged(msg.str());
        }
    }

    const ExperimentSpec& exp_;
    const ForceProfileParams& p_;
    StepGrid grid_;

    Vec y_{};
    double t_ = 0.0;
    double x_ref_ = 0.0;
    double x_d_h_ = 0.0;
    bool in_contact_ = false;
    ControllerState ctrl_{};
    HapticState haptic_{};
    std::vector<SimEvent> events_;
    SimDiagnostics diag_{};
};

}  // namespace

void validate(const SimConfig& cfg) {
    for (double v : {cfg.t_end, cfg.control_dt, cfg.physics_dt, cfg.event_tol, cfg.record_dt})
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("time parameters must be positive and finite");
    if (cfg.physics_dt > cfg.control_dt * (1.0 + 1e-12))
        throw std::invalid_argument("physics_dt must not exceed control_dt");
    if (cfg.event_tol >= cfg.physics_dt)
        throw std::invalid_argument("event_tol must be smaller than physics_dt");
    step_grid(cfg);
}

StepGrid step_grid(const SimConfig& cfg) {
    return {ratio_or_throw(cfg.control_dt, cfg.physics_dt,
                           "control_dt must be an integer multiple of physics_dt"),
            ratio_or_throw(cfg.record_dt, cfg.control_dt,
                           "record_dt must be an integer multiple of control_dt"),
            ratio_or_throw(cfg.t_end, cfg.control_dt,
                           "t_end must be an integer multiple of control_dt")};
}

void validate(const ExperimentSpec& exp) {
    validate(exp.plant);
    validate(exp.sim);
    if (!std::isfinite(exp.T_d) || exp.T_d == 0.0)
        throw std::invalid_argument("T_d must be finite and non-zero");
    if (!(exp.sigma > 0.0) || !std::isfinite(exp.sigma))
        throw std::invalid_argument("sigma must be positive");
    if (!(exp.force_tol >= 0.0) || !std::isfinite(exp.force_tol))
        throw std::invalid_argument("force_tol must be non-negative");
    for (double v : {exp.x_d, exp.x0, exp.v0})
        if (!std::isfinite(v)) throw std::invalid_argument("x_d, x0 and v0 must be finite");
}

SimTrace run_simulation(const ExperimentSpec& exp) {
    validate(exp);
    return Simulation(exp).run();
}

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::PoseCrossing: return "pose_crossing";
        case EventKind::Inversion: return "inversion";
        case EventKind::PushedPast: return "pushed_past";
        case EventKind::Reversal: return "reversal";
        case EventKind::Midpoint: return "midpoint";
        case EventKind::ContactMade: return "contact_made";
        case EventKind::ContactLost: return "contact_lost";
        case EventKind::ReferenceJump: return "reference_jump";
        case EventKind::ProfileKink: return "profile_kink";
    }
    return "unknown";
}

std::string format_number(double v) {
    if (v == 0.0) return "0";  // folds -0
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                   std::chars_format::general, 9);
    return std::string(buf.data(), res.ptr);
}

void write_trace_csv(std::ostream& os, const SimTrace& trace) {
    os << "t,x,x_dot,x_tilde,h_e,F_env,x_d_h,phase,x_max,V,in_contact\n";
    for (const TraceRow& r : trace.rows) {
        os << format_number(r.t) << ',' << format_number(r.x) << ',' << format_number(r.x_dot)
           << ',' << format_number(r.x_tilde) << ',' << format_number(r.h_e) << ','
           << format_number(r.F_env) << ',' << format_number(r.x_d_h) << ','
           << (r.phase == Phase::Diverging ? "diverging" : "converging") << ','
           << format_number(r.x_max) << ',' << format_number(r.V) << ','
           << (r.in_contact ? 1 : 0) << '\n';
    }
}

}  // namespace fic
