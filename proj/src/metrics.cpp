#include "fic/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace fic {

namespace {

constexpr double kSettleBand = 1e-2;
constexpr double kSustainedContact = 0.1;

const char* coupling_name(Coupling c) { return c == Coupling::Welded ? "welded" : "contact"; }

}  // namespace

double normalization_torque(double T_d, double F_max) {
    return std::min(std::abs(T_d), F_max);
}

double normalized_mse(const SimTrace& trace, double T_d, double F_max, TimeWindow window) {
    if (T_d == 0.0) throw std::invalid_argument("T_d must be non-zero");
    const double norm = normalization_torque(T_d, F_max);
    double sum = 0.0;
    long n = 0;
    for (const TraceRow& r : trace.rows) {
        if (r.t < window.begin || r.t > window.end) continue;
        const double e = measured_torque(r) - T_d;
        sum += e * e;
        ++n;
    }
    if (n == 0) throw std::invalid_argument("empty metrics window");
    return sum / static_cast<double>(n) / (norm * norm);
}

double one_percent_reference(double K, double T_d, double F_max) {
    if (K < 0.0) throw std::invalid_argument("K must be non-negative");
    if (T_d == 0.0) throw std::invalid_argument("T_d must be non-zero");
    const double r = K * 0.001 / normalization_torque(T_d, F_max);
    return r * r;
}

double steady_torque(const SimTrace& trace) {
    double sum = 0.0;
    long n = 0;
    for (const TraceRow& r : trace.rows) {
        if (r.t < trace.t_end - 1.0) continue;
        sum += measured_torque(r);
        ++n;
    }
    if (n == 0) throw std::invalid_argument("trace shorter than the steady-state window");
    return sum / static_cast<double>(n);
}

std::vector<ContactInterval> contact_intervals(const SimTrace& trace) {
    std::vector<ContactInterval> out;
    bool touching = !trace.rows.empty() && trace.rows.front().in_contact;
    double since = 0.0;
    for (const SimEvent& e : trace.events) {
        if (e.kind == EventKind::ContactMade && !touching) {
            touching = true;
            since = e.t;
        } else if (e.kind == EventKind::ContactLost && touching) {
            out.push_back({since, e.t, false});
            touching = false;
        }
    }
    if (touching) out.push_back({since, trace.t_end, true});
    return out;
}

ErrorSummary summarize(const SimTrace& trace, const ExperimentSpec& exp) {
    ErrorSummary s;
    const double F_max = exp.profile.F_max();
    const double t_end = trace.t_end;
    s.nmse_full = normalized_mse(trace, exp.T_d, F_max, {0.0, t_end});
    s.nmse_last5 = normalized_mse(trace, exp.T_d, F_max, {t_end - 5.0, t_end});
    s.steady_error = steady_torque(trace) - exp.T_d;

    const double norm = normalization_torque(exp.T_d, F_max);
    s.settle_time = 0.0;
    for (size_t i = 0; i < trace.rows.size(); ++i) {
        const TraceRow& r = trace.rows[i];
        if (std::abs(measured_torque(r) - exp.T_d) / norm >= kSettleBand)
            s.settle_time = i + 1 < trace.rows.size() ? trace.rows[i + 1].t : t_end;
    }

    if (exp.plant.coupling == Coupling::Contact) {
        for (const ContactInterval& c : contact_intervals(trace)) {
            if (c.end - c.begin < kSustainedContact) continue;
            s.contact_broken_after_first = !c.open;
            break;
        }
    }
    return s;
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
    os << "name,coupling,K0,F_max,x_tilde_0,K_env,D_env,T_d,x_d,sigma,status,nmse_full,"
          "nmse_last5,settle_time,steady_error,contact_broken_after_first,"
          "one_percent_ref_Td,one_percent_ref_Tnorm\n";
    for (const SummaryRow& r : rows) {
        const ExperimentSpec& e = r.spec;
        const double k = e.plant.K_env * 0.001;
        os << e.name << ',' << coupling_name(e.plant.coupling) << ','
           << format_number(e.profile.K0()) << ',' << format_number(e.profile.F_max()) << ','
           << format_number(e.profile.x_tilde_0()) << ',' << format_number(e.plant.K_env) << ','
           << format_number(e.plant.D_env) << ',' << format_number(e.T_d) << ','
           << format_number(e.x_d) << ',' << format_number(e.sigma) << ',' << r.status << ',';
        if (r.status == "ok") {
            const ErrorSummary& s = r.summary;
            os << format_number(s.nmse_full) << ',' << format_number(s.nmse_last5) << ','
               << format_number(s.settle_time) << ',' << format_number(s.steady_error) << ','
               << (s.contact_broken_after_first ? "true" : "false") << ',';
        } else {
            os << ",,,,,";
        }
        os << format_number((k / e.T_d) * (k / e.T_d)) << ','
           << format_number(one_percent_reference(e.plant.K_env, e.T_d, e.profile.F_max()))
           << '\n';
    }
}

}  // namespace fic
