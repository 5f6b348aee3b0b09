#include "fic/suite.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "fic/metrics.hpp"

namespace fic {

namespace {

struct Entry {
    std::string value;
    int line;
};

struct Section {
    std::string name;
    int line = 0;
    std::map<std::string, Entry> entries;
};

std::string trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const size_t b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const size_t e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

bool valid_name(const std::string& n) {
    return !n.empty() && std::all_of(n.begin(), n.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
    });
}

// Shortest text that parses back to the same double.
std::string exact(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

class SectionReader {
public:
    SectionReader(const Section& s, const std::string& source) : s_(s), source_(source) {}

    std::optional<double> number(const std::string& key) const {
        const auto it = s_.entries.find(key);
        if (it == s_.entries.end()) return std::nullopt;
        std::string_view v = it->second.value;
        if (!v.empty() && v.front() == '+') v.remove_prefix(1);
        double out = 0.0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (res.ec != std::errc() || res.ptr != v.data() + v.size() || v.empty())
            fail(it->second.line, "key '" + key + "' expects a number, got '" +
                                      it->second.value + "'");
        return out;
    }

    double number_or(const std::string& key, double fallback) const {
        return number(key).value_or(fallback);
    }

    double required(const std::string& key) const {
        const auto v = number(key);
        if (!v) fail(s_.line, "section '" + s_.name + "' is missing required key '" + key + "'");
        return *v;
    }

    std::string word_or(const std::string& key, const std::string& fallback,
                        std::initializer_list<const char*> allowed) const {
        const auto it = s_.entries.find(key);
        if (it == s_.entries.end()) return fallback;
        for (const char* a : allowed)
            if (it->second.value == a) return a;
        std::string msg = "key '" + key + "' expects one of";
        for (const char* a : allowed) msg += std::string(" ") + a;
        fail(it->second.line, msg + ", got '" + it->second.value + "'");
    }

    [[noreturn]] void fail(int line, const std::string& what) const {
        throw ConfigError(source_, line, what);
    }

private:
    const Section& s_;
    const std::string& source_;
};

ExperimentSpec build(const Section& sec, const std::string& source) {
    const SectionReader r(sec, source);
    ExperimentSpec e;
    e.name = sec.name;
    try {
        const double K0 = r.required("K0");
        const double F_max = r.number_or("F_max", kDefaultFMax);
        e.profile = ForceProfileParams(K0, F_max,
                                       r.number_or("x_tilde_0", default_x_tilde_0(K0, F_max)),
                                       r.number_or("x_tilde_b", kDefaultXTildeB),
                                       r.number_or("S", kDefaultS));

        e.plant.coupling = r.word_or("coupling", "welded", {"welded", "contact"}) == "welded"
                               ? Coupling::Welded
                               : Coupling::Contact;
        e.plant.inertia = r.number_or("inertia", e.plant.inertia);
        e.plant.K_env = r.number_or("K_env", e.plant.K_env);
        e.plant.D_env = r.number_or("D_env", e.plant.D_env);
        e.plant.contact_pos = r.number_or("contact_pos", e.plant.contact_pos);
        const double dir = r.number_or("contact_dir", 1.0);
        if (dir != 1.0 && dir != -1.0) throw std::invalid_argument("contact_dir must be +1 or -1");
        e.plant.contact_dir = static_cast<int>(dir);

        e.T_d = r.required("T_d");
        e.x_d = r.number_or("x_d", e.x_d);
        e.sigma = r.number_or("sigma", e.sigma);
        e.force_tol = r.number_or("force_tol", e.force_tol);
        e.x0 = r.number_or("x0", e.x0);
        e.v0 = r.number_or("v0", e.v0);
        e.plant.env_rest = r.number_or("env_rest", e.x0);
        const std::string mode = r.word_or("controller", "fractal", {"fractal", "spring", "off"});
        e.controller = mode == "fractal" ? ControllerMode::Fractal
                       : mode == "spring" ? ControllerMode::Spring
                                          : ControllerMode::Off;
        e.haptic = r.word_or("haptic", "on", {"on", "off"}) == "on";

        e.sim.t_end = r.number_or("t_end", e.sim.t_end);
        e.sim.control_dt = r.number_or("control_dt", e.sim.control_dt);
        e.sim.physics_dt = r.number_or("physics_dt", e.sim.physics_dt);
        e.sim.event_tol = r.number_or("event_tol", e.sim.event_tol);
        e.sim.record_dt = r.number_or("record_dt", e.sim.control_dt);
        validate(e);
    } catch (const std::invalid_argument& ex) {
        r.fail(sec.line, "section '" + sec.name + "': " + ex.what());
    }
    return e;
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& what)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : "") + ": " + what),
      line_(line) {}

const std::vector<std::string>& suite_keys() {
    static const std::vector<std::string> keys = {
        "coupling", "K0",        "F_max",      "x_tilde_0",  "x_tilde_b", "S",
        "inertia",  "K_env",     "D_env",      "contact_pos", "contact_dir", "env_rest",
        "T_d",      "x_d",       "sigma",      "force_tol",  "x0",        "v0",
        "controller", "haptic",  "t_end",      "control_dt", "physics_dt", "event_tol",
        "record_dt"};
    return keys;
}

std::vector<ExperimentSpec> parse_suite(std::istream& in, const std::string& source) {
    const auto& keys = suite_keys();
    std::vector<Section> sections;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(source, line_no, "unterminated section header");
            Section s;
            s.name = trim(std::string_view(line).substr(1, line.size() - 2));
            s.line = line_no;
            if (!valid_name(s.name))
                throw ConfigError(source, line_no,
                                  "section name must use letters, digits, '_', '-' or '.'");
            for (const Section& other : sections)
                if (other.name == s.name)
                    throw ConfigError(source, line_no, "duplicate section '" + s.name + "'");
            sections.push_back(std::move(s));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source, line_no, "expected 'key = value' or '[section]'");
        if (sections.empty())
            throw ConfigError(source, line_no, "key outside of any [section]");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw ConfigError(source, line_no, "unknown key '" + key + "'");
        if (value.empty()) throw ConfigError(source, line_no, "empty value for '" + key + "'");
        auto& entries = sections.back().entries;
        if (entries.count(key))
            throw ConfigError(source, line_no, "duplicate key '" + key + "'");
        entries.emplace(key, Entry{value, line_no});
    }

    std::vector<ExperimentSpec> specs;
    specs.reserve(sections.size());
    for (const Section& s : sections) specs.push_back(build(s, source));
    return specs;
}

std::vector<ExperimentSpec> load_suite(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), 0, "cannot open file");
    return parse_suite(in, path.string());
}

std::string format_suite(const std::vector<ExperimentSpec>& specs) {
    std::ostringstream os;
    bool first = true;
    for (const ExperimentSpec& e : specs) {
        if (!first) os << '\n';
        first = false;
        const auto kv = [&](const char* k, const std::string& v) { os << k << " = " << v << '\n'; };
        os << '[' << e.name << "]\n";
        kv("coupling", e.plant.coupling == Coupling::Welded ? "welded" : "contact");
        kv("K0", exact(e.profile.K0()));
        kv("F_max", exact(e.profile.F_max()));
        kv("x_tilde_0", exact(e.profile.x_tilde_0()));
        kv("x_tilde_b", exact(e.profile.x_tilde_b()));
        kv("S", exact(e.profile.S()));
        kv("inertia", exact(e.plant.inertia));
        kv("K_env", exact(e.plant.K_env));
        kv("D_env", exact(e.plant.D_env));
        kv("contact_pos", exact(e.plant.contact_pos));
        kv("contact_dir", std::to_string(e.plant.contact_dir));
        kv("env_rest", exact(e.plant.env_rest));
        kv("T_d", exact(e.T_d));
        kv("x_d", exact(e.x_d));
        kv("sigma", exact(e.sigma));
        kv("force_tol", exact(e.force_tol));
        kv("x0", exact(e.x0));
        kv("v0", exact(e.v0));
        kv("controller", e.controller == ControllerMode::Fractal  ? "fractal"
                         : e.controller == ControllerMode::Spring ? "spring"
                                                                  : "off");
        kv("haptic", e.haptic ? "on" : "off");
        kv("t_end", exact(e.sim.t_end));
        kv("control_dt", exact(e.sim.control_dt));
        kv("physics_dt", exact(e.sim.physics_dt));
        kv("event_tol", exact(e.sim.event_tol));
        kv("record_dt", exact(e.sim.record_dt));
    }
    return os.str();
}

std::string content_hash(std::string_view bytes) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a(bytes);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<size_t>(i)] = digits[h & 0xf];
    return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

int run_suite(const std::vector<ExperimentSpec>& specs, const RunOptions& opts,
              std::ostream& log) {
    std::filesystem::create_directories(opts.out_dir);

    std::vector<SummaryRow> rows(specs.size());
    std::vector<std::pair<std::string, std::string>> files(specs.size());  // name, hash
    std::vector<size_t> sizes(specs.size(), 0);
    std::atomic<size_t> next{0};
    std::mutex log_mutex;

    auto worker = [&] {
        for (size_t i = next++; i < specs.size(); i = next++) {
            const ExperimentSpec& e = specs[i];
            rows[i].spec = e;
            try {
                const SimTrace trace = run_simulation(e);
                std::ostringstream csv;
                write_trace_csv(csv, trace);
                const std::string body = csv.str();
                const std::string file = e.name + "_trace.csv";
                write_file_atomic(opts.out_dir / file, body);
                files[i] = {file, content_hash(body)};
                sizes[i] = body.size();
                rows[i].summary = summarize(trace, e);
                rows[i].status = "ok";
            } catch (const SimulationDiverged& ex) {
                rows[i].status = "diverged";
                const std::lock_guard<std::mutex> lock(log_mutex);
                log << "error: " << ex.what() << '\n';
            } catch (const std::exception& ex) {
                rows[i].status = "error";
                const std::lock_guard<std::mutex> lock(log_mutex);
                log << "error: run '" << e.name << "': " << ex.what() << '\n';
            }
        }
    };

    const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(specs.size())));
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    std::ostringstream summary;
    write_summary_csv(summary, rows);
    const std::string summary_body = summary.str();
    write_file_atomic(opts.out_dir / "summary.csv", summary_body);

    nlohmann::json manifest;
    manifest["hash"] = "fnv1a64";
    manifest["files"] = nlohmann::json::array();
    std::vector<std::tuple<std::string, std::string, size_t>> listed;
    for (size_t i = 0; i < specs.size(); ++i)
        if (!files[i].first.empty()) listed.emplace_back(files[i].first, files[i].second, sizes[i]);
    listed.emplace_back("summary.csv", content_hash(summary_body), summary_body.size());
    std::sort(listed.begin(), listed.end());
    for (const auto& [name, hash, size] : listed)
        manifest["files"].push_back({{"path", name}, {"bytes", size}, {"fnv1a64", hash}});
    write_file_atomic(opts.out_dir / "manifest.json", manifest.dump(2) + "\n");

    const bool all_ok = std::all_of(rows.begin(), rows.end(),
                                    [](const SummaryRow& r) { return r.status == "ok"; });
    return all_ok ? 0 : 1;
}

}  // namespace fic
