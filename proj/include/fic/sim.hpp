#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "fic/controller.hpp"
#include "fic/haptic.hpp"
#include "fic/plant.hpp"
#include "fic/profiles.hpp"

namespace fic {

struct SimConfig {
    double t_end = 10.0;
    double control_dt = 0.01;
    double physics_dt = 1e-4;
    double event_tol = 1e-9;
    double record_dt = 0.01;

    bool operator==(const SimConfig&) const = default;
};

void validate(const SimConfig& cfg);

/// Physics sub-steps per control tick and control ticks per record / per run.
struct StepGrid {
    long substeps;
    long ticks_per_record;
    long ticks;
};
StepGrid step_grid(const SimConfig& cfg);

/// Fractal: full phase-switching controller. Spring: divergence law only
/// (h_e = -F_K). Off: zero torque.
enum class ControllerMode { Fractal, Spring, Off };

struct ExperimentSpec {
    std::string name;
    ForceProfileParams profile{100.0, kDefaultFMax, kDefaultXTilde0, kDefaultXTildeB, kDefaultS};
    PlantConfig plant;
    SimConfig sim;
    double T_d = 5.0;        // desired interaction torque (N·m)
    double x_d = 0.0;        // expected contact displacement from x0 (rad)
    double sigma = 0.01;
    double force_tol = 1e-3;
    double x0 = 0.0;         // initial angle, also the exploration reference pose
    double v0 = 0.0;
    ControllerMode controller = ControllerMode::Fractal;
    bool haptic = true;      // false: desired position fixed at x0 + x_d

    bool operator==(const ExperimentSpec&) const = default;
};

/// Throws std::invalid_argument naming the violated invariant.
void validate(const ExperimentSpec& exp);

struct TraceRow {
    double t;
    double x;
    double x_dot;
    double x_tilde;
    double h_e;
    double F_env;
    double x_d_h;
    Phase phase;
    double x_max;
    double V;
    bool in_contact;
};

enum class EventKind {
    PoseCrossing,      // x~ changed sign; new episode
    Inversion,         // divergence -> convergence at the apex
    PushedPast,        // |x~| exceeded x_max during convergence
    Reversal,          // moving away again during convergence
    Midpoint,          // |x~| = x_max / 2 during convergence (log only)
    ContactMade,
    ContactLost,
    ReferenceJump,     // x_d^h update moved the state across a phase boundary
    ProfileKink,       // |x~| crossed x_tilde_0 or x_tilde_b (step split, not logged)
};

const char* to_string(EventKind k);

struct SimEvent {
    EventKind kind;
    double t;
    double x;
    double x_tilde;
    double x_tilde_dot;
    double x_max;          // after the transition
    double torque_before;
    double torque_after;
    double V_before;
    double V_after;
    double work_ctrl;      // controller work on the body since t = 0 (J)
    double work_env;       // environment work on the body since t = 0 (J)
};

struct SimDiagnostics {
    double max_abs_torque = 0.0;  // over every torque evaluation, RK stages included
    double max_pull = 0.0;        // largest adhesive contact torque seen (should stay 0)
    long accepted_steps = 0;
    long event_count = 0;
    double work_ctrl = 0.0;
    double work_env = 0.0;
    double x_final = 0.0;
    double x_dot_final = 0.0;
};

struct SimTrace {
    std::vector<TraceRow> rows;
    std::vector<SimEvent> events;
    SimDiagnostics diagnostics;
    double t_end = 0.0;
};

class SimulationDiverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fixed-step RK4 with bisection-localized events; the force search ticks at
/// control_dt. Throws SimulationDiverged if |x| or |x_dot| exceeds 1e6.
SimTrace run_simulation(const ExperimentSpec& exp);

/// CSV with header, 9 significant digits.
void write_trace_csv(std::ostream& os, const SimTrace& trace);

/// printf-style "%.9g", locale independent.
std::string format_number(double v);

}  // namespace fic
