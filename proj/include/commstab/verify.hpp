#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "commstab/config.hpp"
#include "commstab/stability.hpp"

namespace commstab::verify {

enum class Status { pass, fail, skipped };

struct CheckResult {
  std::string name;
  Status status = Status::skipped;
  double residual = 0.0;   // worst measured value; meaningful for pass/fail
  double tolerance = 0.0;
  std::string detail;
};

struct SuiteOptions {
  // When set, model-dependent checks bind to this config's structure (checks
  // for the other regime report skipped) and every integration uses its dt,
  // eps_converged, and sample_stride. Without it the built-in gapped,
  // full-coverage, and threshold parameter sets are used.
  std::optional<RunConfig> config;
};

// Cross-checks of the closed forms against their oracles plus the dynamic
// invariants the boundary ODEs must satisfy, each with a pinned tolerance.
std::vector<CheckResult> run_suite(const SuiteOptions& opts = {});

bool all_passed(const std::vector<CheckResult>& results);
std::string format_results(const std::vector<CheckResult>& results);

// Random valid community pair; with fixed params only the structure and the
// boundary offsets vary. unique_argmax keeps every demand half-width inside
// the interest reach so the optimal content point is unique.
CommunityPairState random_pair_state(std::mt19937_64& rng,
                                     const std::optional<ModelParams>& fixed_params,
                                     bool unique_argmax);

}  // namespace commstab::verify
