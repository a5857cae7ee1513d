#pragma once

#include "gansmooth/common.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gansmooth::verify {

struct CheckResult {
    std::string id;      // criterion label, e.g. "C4"
    std::string name;
    bool pass = false;
    double observed = 0.0;
    std::string bound;   // human-readable acceptance region
    std::string detail;
};

struct Options {
    std::uint64_t seed = 7;
    /// Constants handed to the trainer certificate and step size.
    double trainer_beta1 = 4.0 * kPi;
    double trainer_beta2 = 2.0 * kPi;
};

inline constexpr std::string_view kSuites[] = {"divergences", "smoothness", "envelopes", "rkhs", "nnsmooth", "trainer"};

/// Runs one suite, or every suite for "all". Throws ConfigError on an unknown name.
std::vector<CheckResult> run_suite(std::string_view suite, const Options& opts = {});

/// "PASS C4 name: observed=... bound=... (detail)"
std::string format(const CheckResult& r);
void print(std::ostream& os, const std::vector<CheckResult>& results);
bool all_passed(const std::vector<CheckResult>& results);

}  // namespace gansmooth::verify
