#pragma once

/**
 * @file harness.hpp
 * @brief Property suites, the worked-example demo and scenario reports.
 *
 * Exit codes: 0 pass, 1 theorem check failed (a defect), 2 precondition or
 * validation rejection (an expected outcome for counterexample systems),
 * 3 malformed input.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kr/io.hpp"

namespace kr {

enum ExitCode : int { kExitPass = 0, kExitTheoremFailure = 1, kExitRejected = 2, kExitMalformed = 3 };

struct ScenarioReport {
    std::string scenario;
    Json inputs = Json::object();
    /// "pass", "fail" or "error"
    std::string outcome = "pass";
    Json certificates = Json::array();
    Json details = Json::object();
    /// Failing checks, each with a standalone reproduction command.
    Json failures = Json::array();
    std::optional<double> timing_ms;
    int exit_code = kExitPass;

    Json to_json() const;
};

inline constexpr const char* kSuiteNames[] = {"kac", "poincare", "tower", "aperiodic", "approx"};

struct SuiteOptions {
    std::string name;
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
    /// Index of the first trial; trial i uses mix_seed(seed, i).
    std::uint64_t offset = 0;
    unsigned threads = 1;
};

/// Throws DomainError for an unknown suite name or trials < 1.
ScenarioReport run_suite(const SuiteOptions& options);

/// Reproduces the two-point swap example value by value.
ScenarioReport demo_paper_examples();

/// Reads KR_SEED / KR_THREADS, falling back to the given defaults.
std::uint64_t default_seed(std::uint64_t fallback = 0);
unsigned default_threads();

}  // namespace kr
