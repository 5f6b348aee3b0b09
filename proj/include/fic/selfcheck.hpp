#pragma once

#include <string>
#include <vector>

namespace fic {

struct CheckResult {
    std::string name;
    bool passed;
    std::string detail;
};

/// Quick invariant battery behind `fic --check`: profile shape, energy
/// integral, force continuity at inversion, conservation and the welded
/// closed-form solution.
std::vector<CheckResult> run_self_checks();

}  // namespace fic
