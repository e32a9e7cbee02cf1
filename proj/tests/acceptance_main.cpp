// Acceptance suite: runs every criterion on the default configuration
// (N = 3 unit ball, f = h = power(0, 1)) and prints one line per criterion.

#include <cstdio>

#include "gpseg/config.hpp"
#include "gpseg/report.hpp"

int main() {
    gpseg::ExperimentConfig cfg;  // defaults == the default configuration
    cfg.output_dir = "acceptance_out";

    auto rep = gpseg::run_acceptance(cfg);
    int failures = 0;
    for (const auto& c : rep.criteria) {
        std::printf("%s  criterion %2d  %-34s %s\n", c.pass ? "PASS" : "FAIL", c.id,
                    c.name.c_str(), c.detail.c_str());
        std::fflush(stdout);
        if (!c.pass) ++failures;
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
