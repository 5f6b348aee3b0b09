#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "fic/sim.hpp"
#include "oracles.hpp"

using fic::ControllerMode;
using fic::EventKind;
using fic::ExperimentSpec;
using fic::SimTrace;

namespace {

ExperimentSpec welded_free_decay(double physics_dt) {
    ExperimentSpec e;
    e.name = "decay";
    e.controller = ControllerMode::Off;
    e.haptic = false;
    e.x0 = 0.1;
    e.plant.env_rest = 0.0;
    e.sim.t_end = 2.0;
    e.sim.physics_dt = physics_dt;
    return e;
}

double oracle_error(const ExperimentSpec& e) {
    const oracle::DampedOscillator exact{e.plant.inertia, e.plant.D_env, e.plant.K_env,
                                         e.plant.env_rest, e.x0, e.v0};
    const SimTrace tr = fic::run_simulation(e);
    double worst = 0.0;
    for (const fic::TraceRow& r : tr.rows) worst = std::max(worst, std::abs(r.x - exact(r.t)));
    return worst;
}

// Linear spring oscillator with no environment: V must stay constant.
ExperimentSpec free_spring(double physics_dt) {
    ExperimentSpec e;
    e.name = "spring";
    e.controller = ControllerMode::Spring;
    e.haptic = false;
    e.plant.K_env = 0.0;
    e.plant.D_env = 0.0;
    e.x0 = 0.06;
    e.x_d = -0.06;
    e.sim.physics_dt = physics_dt;
    return e;
}

double energy_drift(const ExperimentSpec& e) {
    const SimTrace tr = fic::run_simulation(e);
    double worst = 0.0;
    for (const fic::TraceRow& r : tr.rows) worst = std::max(worst, std::abs(r.V - tr.rows[0].V));
    return worst;
}

// Body leaves the desired pose with speed v0 and no environment.
ExperimentSpec launch(double v0) {
    ExperimentSpec e;
    e.name = "launch";
    e.haptic = false;
    e.plant.K_env = 0.0;
    e.plant.D_env = 0.0;
    e.v0 = v0;
    e.sim.t_end = 3.0;
    return e;
}

const fic::SimEvent* first_of(const SimTrace& tr, EventKind k) {
    for (const fic::SimEvent& e : tr.events)
        if (e.kind == k) return &e;
    return nullptr;
}

}  // namespace

TEST_CASE("welded plant without controller follows the closed form") {
    CHECK(oracle_error(welded_free_decay(1e-4)) < 1e-6);
    ExperimentSpec e = welded_free_decay(1e-4);
    e.v0 = -0.7;
    e.plant.D_env = 20.0;  // underdamped branch of the oracle
    CHECK(oracle_error(e) < 1e-6);
}

TEST_CASE("integrator is fourth order") {
    const double e1 = oracle_error(welded_free_decay(0.01));
    const double e2 = oracle_error(welded_free_decay(0.005));
    const double e3 = oracle_error(welded_free_decay(0.0025));
    CHECK(e1 / e2 >= 8.0);
    CHECK(e2 / e3 >= 8.0);
}

TEST_CASE("spring-only oscillator conserves energy") {
    CHECK(energy_drift(free_spring(1e-4)) < 1e-6);
    const double coarse = energy_drift(free_spring(0.01));
    const double fine = energy_drift(free_spring(0.005));
    CHECK(coarse / fine >= 8.0);
}

TEST_CASE("runs are bit-identical") {
    ExperimentSpec e;
    e.name = "repeat";
    e.plant.coupling = fic::Coupling::Contact;
    e.plant.contact_pos = 0.5;
    e.x_d = 0.5;
    std::ostringstream a, b;
    fic::write_trace_csv(a, fic::run_simulation(e));
    fic::write_trace_csv(b, fic::run_simulation(e));
    CHECK(a.str() == b.str());
}

TEST_CASE("inversion keeps torque and stored energy continuous") {
    for (double v0 : {0.05, 0.2, 0.5, 1.0, -0.8}) {
        const SimTrace tr = fic::run_simulation(launch(v0));
        const fic::SimEvent* inv = first_of(tr, EventKind::Inversion);
        REQUIRE(inv != nullptr);
        CHECK(std::abs(inv->torque_after - inv->torque_before) < 1e-9 * 15.0);
        CHECK(std::abs(inv->V_after - inv->V_before) < 1e-9);
        CHECK(std::abs(inv->x_tilde_dot) < 1e-6);
    }
}

TEST_CASE("energy released by the antagonist over the far half") {
    const fic::ForceProfileParams& p = launch(0).profile;
    for (double v0 : {0.1, 0.5, 1.0}) {
        const ExperimentSpec e = launch(v0);
        const SimTrace tr = fic::run_simulation(e);
        const fic::SimEvent* inv = first_of(tr, EventKind::Inversion);
        const fic::SimEvent* mid = first_of(tr, EventKind::Midpoint);
        REQUIRE(inv != nullptr);
        REQUIRE(mid != nullptr);
        const double x_max = inv->x_max;
        const double e_k = fic::energy_profile(p, x_max);
        const double released = fic::antagonist_energy(p, x_max, x_max);

        // Divergence absorbed the launch energy.
        CHECK(std::abs(-inv->work_ctrl - e_k) < 1e-6);
        CHECK(std::abs(e_k - 0.5 * e.plant.inertia * v0 * v0) < 1e-6);
        // Far half of convergence returns E_AA(x_max), not E_K / 2.
        const double work = mid->work_ctrl - inv->work_ctrl;
        CHECK(std::abs(work - released) < 1e-6);
        const double dE_A = 2.0 * released - e_k;
        CHECK(std::abs((work - 0.5 * e_k) - 0.5 * dE_A) < 1e-6);
    }
}

TEST_CASE("crossing the pose resets the episode") {
    ExperimentSpec e = launch(0.0);
    e.x0 = 0.3;
    e.x_d = -0.3;  // released from rest away from the pose
    const SimTrace tr = fic::run_simulation(e);
    int crossings = 0;
    for (const fic::SimEvent& ev : tr.events) {
        if (ev.kind != EventKind::PoseCrossing) continue;
        ++crossings;
        CHECK(ev.x_max == 0.0);
        CHECK(std::abs(ev.x_tilde) < 1e-6);
    }
    CHECK(crossings >= 1);
}

TEST_CASE("commanded torque stays within F_max") {
    for (auto coupling : {fic::Coupling::Welded, fic::Coupling::Contact}) {
        for (double K0 : {1.0, 100.0}) {
            ExperimentSpec e;
            e.name = "bound";
            e.profile = fic::ForceProfileParams(K0, 15.0, fic::default_x_tilde_0(K0, 15.0), 0.11, 20.0);
            e.plant.coupling = coupling;
            e.plant.contact_pos = 0.5;
            e.x_d = coupling == fic::Coupling::Contact ? 0.5 : 0.05;
            const SimTrace tr = fic::run_simulation(e);
            CHECK(tr.diagnostics.max_abs_torque <= 15.0);
            for (const fic::TraceRow& r : tr.rows) REQUIRE(std::abs(r.h_e) <= 15.0);
        }
    }
}

TEST_CASE("contact events are localized without tunnelling") {
    for (double K : {50.0, 500.0}) {
        ExperimentSpec e;
        e.name = "impact";
        e.plant.coupling = fic::Coupling::Contact;
        e.plant.contact_pos = 0.5;
        e.plant.K_env = K;
        e.x_d = 0.5;
        const SimTrace tr = fic::run_simulation(e);
        int made = 0;
        for (const fic::SimEvent& ev : tr.events) {
            if (ev.kind == EventKind::ContactMade) {
                ++made;
                const double depth = ev.x - 0.5;
                CHECK(depth > 0.0);
                CHECK(depth <= std::abs(ev.x_tilde_dot) * e.sim.event_tol * 1.01 + 1e-15);
            }
            if (ev.kind == EventKind::ContactLost) CHECK(ev.x - 0.5 <= 0.0);
        }
        CHECK(made >= 1);
        CHECK(tr.diagnostics.max_pull <= 0.0);
    }
}

TEST_CASE("trace CSV layout") {
    ExperimentSpec e;
    e.name = "csv";
    e.x_d = 0.05;
    e.sim.t_end = 1.0;
    const SimTrace tr = fic::run_simulation(e);
    std::ostringstream os;
    fic::write_trace_csv(os, tr);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x,x_dot,x_tilde,h_e,F_env,x_d_h,phase,x_max,V,in_contact");
    int rows = 0;
    double prev_t = -1.0;
    while (std::getline(in, line)) {
        ++rows;
        const double t = std::stod(line.substr(0, line.find(',')));
        CHECK(t > prev_t);
        if (rows > 1) CHECK(t - prev_t == doctest::Approx(0.01));
        prev_t = t;
    }
    CHECK(rows == 100);
    CHECK(fic::format_number(1.0 / 3.0) == "0.333333333");
    CHECK(fic::format_number(-0.0) == "0");
    CHECK(fic::format_number(1e-12) == "1e-12");
}

TEST_CASE("record grid coarser than the control tick") {
    ExperimentSpec e;
    e.name = "sparse";
    e.x_d = 0.05;
    e.sim.t_end = 1.0;
    e.sim.record_dt = 0.05;
    CHECK(fic::run_simulation(e).rows.size() == 20);
}

TEST_CASE("divergence guard aborts") {
    ExperimentSpec e = launch(2e6);
    CHECK_THROWS_AS(fic::run_simulation(e), fic::SimulationDiverged);
}

TEST_CASE("invalid timing is rejected") {
    ExperimentSpec e;
    e.name = "bad";
    e.sim.physics_dt = 0.02;
    CHECK_THROWS_AS(fic::run_simulation(e), std::invalid_argument);
    e.sim = fic::SimConfig{};
    e.sim.physics_dt = 3e-4;
    CHECK_THROWS_WITH_AS(fic::run_simulation(e), "control_dt must be an integer multiple of physics_dt",
                         std::invalid_argument);
    e.sim = fic::SimConfig{};
    e.sim.record_dt = 0.015;
    CHECK_THROWS_AS(fic::run_simulation(e), std::invalid_argument);
    e.sim = fic::SimConfig{};
    e.T_d = 0.0;
    CHECK_THROWS_AS(fic::run_simulation(e), std::invalid_argument);
}
