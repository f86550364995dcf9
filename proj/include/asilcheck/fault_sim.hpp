#pragma once

#include <cstdint>
#include <string>

#include "asilcheck/model.hpp"

namespace asilcheck::sim {

struct SimConfig {
  std::string safety_goal_id;
  double mission_hours = 1e4;
  std::int64_t trials = 100'000;
  std::uint64_t seed = 0;
  unsigned threads = 1;  // does not affect the result
};

struct SimResult {
  double empirical_fit = 0.0;   // violations / (trials * mission_hours) * 1e9
  double standard_error = 0.0;  // FIT
  std::int64_t violations = 0;
  std::int64_t trials = 0;

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

/// Seed of one trial's random stream, derived from the run seed and the
/// trial index only.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) noexcept;

/// Monte Carlo estimate of a safety goal's PMHF under the first-order fault
/// model. Each fault entry is a Poisson process at its safety-related rate;
/// an arrival escapes detection with probability 1 - DC and then violates
/// the goal. SEooC components violate at their subsumed rate.
///
/// Throws Error(unknown_reference) for an unknown goal,
/// Error(missing_fault_data) when a component below the goal has no fault
/// model, and Error(range_violation / non_positive_hours) for bad settings.
SimResult simulate_pmhf(const SafetyModel& model, const SimConfig& config);

}  // namespace asilcheck::sim
