#pragma once

#include <string>
#include <vector>

namespace jcas::app {

struct SelftestOptions {
    /// Test mode: "unitarity" perturbs one code-matrix entry by 1e-3.
    std::string inject_fault;
    std::size_t threads = 1;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

std::vector<CheckResult> run_selftest(const SelftestOptions& options);

/// Names accepted by SelftestOptions::inject_fault.
std::vector<std::string> selftest_faults();

}  // namespace jcas::app
