// Runs the fourteen end-to-end verification checks and prints one line per
// check. Exit code 0 only when every check passes.
#include "platemem/acceptance.hpp"

#include <cstdio>
#include <iostream>

int main() {
    std::vector<platemem::CheckResult> results = platemem::run_acceptance_suite(&std::cerr);
    bool all = true;
    for (const platemem::CheckResult& r : results) {
        std::printf("%s  %2d  %s: %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str());
        all = all && r.pass;
    }
    std::printf("%s (%zu checks)\n", all ? "ALL PASS" : "FAILURES PRESENT", results.size());
    return all ? 0 : 1;
}
