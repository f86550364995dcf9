#pragma once

#include <optional>
#include <string>
#include <vector>

#include "asilcheck/asil.hpp"
#include "asilcheck/finding.hpp"
#include "asilcheck/model.hpp"
#include "asilcheck/propagation.hpp"

namespace asilcheck::sw {

/// Highest field incident rate (FIT) a proven-in-use argument may show for
/// each ASIL: D 1, C 10, B 100, A 1000. QM has no limit.
std::optional<double> proven_in_use_threshold(AsilLevel level) noexcept;

/// Highest level whose threshold lies strictly above `observed_fit`.
AsilLevel max_asil_supported(double observed_fit) noexcept;

struct PiuVerdict {
  std::string element_id;
  double observed_fit = 0.0;
  PiuEstimator estimator = PiuEstimator::point;
  AsilLevel target = AsilLevel::QM;
  std::optional<double> threshold;  // for `target`; none for QM
  AsilLevel max_asil_supported = AsilLevel::QM;
  AsilLevel pass_for = AsilLevel::QM;  // min(target, max_asil_supported)
  bool passed = false;
  std::optional<std::string> note;

  friend bool operator==(const PiuVerdict&, const PiuVerdict&) = default;
};

/// Proven-in-use argument for `target`. The point estimator uses k/T, the
/// conservative one (k+1)/T; the rate must lie strictly below the threshold.
/// Throws Error(non_positive_hours) unless service_hours > 0.
PiuVerdict proven_in_use_check(const ProvenInUseEvidence& evidence, AsilLevel target, PiuEstimator estimator);

/// One verdict per evidence record, at the element's effective ASIL and the
/// configured estimator.
std::vector<PiuVerdict> proven_in_use_verdicts(const SafetyModel& model, const propagation::AsilMap& effective);

std::vector<Finding> tool_qualification_check(const SafetyModel& model, const propagation::AsilMap& effective);

std::vector<Finding> external_component_check(const SafetyModel& model, const propagation::AsilMap& effective);

}  // namespace asilcheck::sw
