// The verification suite: fourteen end-to-end checks of the solver against
// the model's provable structure (energy identity, decay of the linear part,
// convergence to equilibrium, rate laws, compactness of the history tail),
// each scaled to run in well under two minutes. Shared by the `verify`
// subcommand and the acceptance test binary.
#pragma once

#include "platemem/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace platemem {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail; // measured numbers and thresholds
};

// Runs all fourteen checks with fixed seeds (deterministic). Progress lines
// are written to `progress` when given, one per completed stage.
std::vector<CheckResult> run_acceptance_suite(std::ostream* progress = nullptr);

bool all_pass(const std::vector<CheckResult>& results);

} // namespace platemem
