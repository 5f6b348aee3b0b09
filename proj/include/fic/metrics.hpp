#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fic/sim.hpp"

namespace fic {

struct TimeWindow {
    double begin;
    double end;  // inclusive
};

/// Torque the body applies to the environment (what a joint sensor reads).
inline double measured_torque(const TraceRow& r) { return -r.F_env; }

/// min(|T_d|, F_max): targets beyond saturation are normalized by F_max.
double normalization_torque(double T_d, double F_max);

/// mean((T - T_d)^2) / T_norm^2 over rows with t in the window.
/// Throws std::invalid_argument for an empty window or T_d == 0.
double normalized_mse(const SimTrace& trace, double T_d, double F_max, TimeWindow window);

/// (K * 0.001 / T_norm)^2, the error level of a 1 mrad position offset.
double one_percent_reference(double K, double T_d, double F_max = kDefaultFMax);

struct ErrorSummary {
    double nmse_full = 0.0;
    double nmse_last5 = 0.0;
    double settle_time = 0.0;   // t_end when the error never settles
    double steady_error = 0.0;  // mean of T - T_d over the final second (N·m)
    bool contact_broken_after_first = false;
};

struct ContactInterval {
    double begin;
    double end;
    bool open;  // still touching at the end of the run
};

/// Contact intervals reconstructed from the localized make/break events.
std::vector<ContactInterval> contact_intervals(const SimTrace& trace);

/// contact_broken_after_first: the first contact that lasts 0.1 s is later lost.
ErrorSummary summarize(const SimTrace& trace, const ExperimentSpec& exp);

/// Mean measured torque over the final second.
double steady_torque(const SimTrace& trace);

struct SummaryRow {
    ExperimentSpec spec;
    std::string status;  // "ok", "diverged" or "error"
    ErrorSummary summary;
};

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);

}  // namespace fic
