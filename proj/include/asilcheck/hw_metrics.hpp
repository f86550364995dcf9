#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asilcheck/asil.hpp"
#include "asilcheck/finding.hpp"
#include "asilcheck/model.hpp"
#include "asilcheck/propagation.hpp"

namespace asilcheck::hw {

inline constexpr double kHoursPerFitUnit = 1e9;

/// Failure rate in FIT from an observed count over `hours` of operation.
/// Throws Error(non_positive_hours) unless hours > 0.
double fit_from_observation(std::int64_t failures, double hours);

/// Residual FIT of one fault entry: lambda_SR * (1 - DC), DC = 0 when uncovered.
double residual_fit(const SafetyModel& model, const FaultEntry& entry);

/// Residual FIT of a component: the SEooC budget when present, else the sum
/// of its fault entries' residuals.
double component_residual_fit(const SafetyModel& model, const HwComponent& component);

struct PmhfResult {
  std::string safety_goal_id;
  AsilLevel asil = AsilLevel::QM;
  double analytic_fit = 0.0;
  std::map<std::string, double> contributions;  // component id -> FIT
  std::optional<double> target;
  bool pass = true;

  friend bool operator==(const PmhfResult&, const PmhfResult&) = default;
};

/// First-order PMHF (single-point plus residual faults) of one safety goal
/// over the hardware components allocated below it. Throws
/// Error(missing_fault_data) when an ASIL B+ goal reaches a component with
/// neither fault data nor an SEooC budget.
PmhfResult pmhf(const SafetyModel& model, const SafetyGoal& goal, const propagation::AsilMap& propagated);

struct ArchMetrics {
  std::string safety_goal_id;
  AsilLevel asil = AsilLevel::QM;
  double spfm = 1.0;
  double lfm = 1.0;
  std::optional<double> spfm_target;
  std::optional<double> lfm_target;
  bool spfm_pass = true;
  bool lfm_pass = true;
  std::vector<std::string> notes;

  friend bool operator==(const ArchMetrics&, const ArchMetrics&) = default;
};

/// SPFM and LFM over the non-SEooC components of a safety goal.
ArchMetrics arch_metrics(const SafetyModel& model, const SafetyGoal& goal, const propagation::AsilMap& propagated);

struct HwBudgets {
  std::vector<PmhfResult> pmhf;
  std::vector<ArchMetrics> arch;
  std::vector<Finding> findings;
};

/// Runs pmhf and arch_metrics for every safety goal and compares them with
/// the configured targets. Missing fault data becomes a finding.
HwBudgets check_hw_budgets(const SafetyModel& model, const propagation::AsilMap& propagated);

}  // namespace asilcheck::hw
