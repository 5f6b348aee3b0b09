#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fic/sim.hpp"

namespace fic {

/// Parse or validation failure in a suite file. `line` is 1-based, 0 if unknown.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, int line, const std::string& what);
    int line() const { return line_; }

private:
    int line_;
};

/// Sections `[name]` followed by `key = value` lines; `#` and `;` start
/// comments. Unset keys take their defaults, unknown keys are rejected.
std::vector<ExperimentSpec> parse_suite(std::istream& in, const std::string& source = "<input>");
std::vector<ExperimentSpec> load_suite(const std::filesystem::path& path);

/// Canonical text for a suite; parse_suite(format_suite(s)) == s.
std::string format_suite(const std::vector<ExperimentSpec>& specs);

/// Keys accepted inside a section, in canonical order.
const std::vector<std::string>& suite_keys();

struct RunOptions {
    std::filesystem::path out_dir;
    int jobs = 1;
};

/// Runs every spec, writes <name>_trace.csv, summary.csv and manifest.json
/// into out_dir. Returns 0 when every run completed, 1 otherwise.
int run_suite(const std::vector<ExperimentSpec>& specs, const RunOptions& opts,
              std::ostream& log);

/// Write to a sibling temporary, then rename over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// 64-bit FNV-1a of the bytes, as 16 lowercase hex digits.
std::string content_hash(std::string_view bytes);

}  // namespace fic
