#pragma once

#include <string>
#include <vector>

#include "asilcheck/asil.hpp"
#include "asilcheck/finding.hpp"
#include "asilcheck/model.hpp"

namespace asilcheck::hara {

struct HaraAssignment {
  std::string hazardous_event_id;
  int sum = 0;  // E + S + C
  AsilLevel computed_asil = AsilLevel::QM;
  bool zero_summand = false;

  friend bool operator==(const HaraAssignment&, const HaraAssignment&) = default;
};

/// ASIL from exposure (0..4), severity (0..3) and controllability (0..3).
/// Any zero rating gives QM; otherwise the sum maps 10 -> D, 9 -> C,
/// 8 -> B, 7 -> A and anything lower to QM. Throws Error(range_violation)
/// for out-of-range ratings.
AsilLevel classify_asil(int exposure, int severity, int controllability);

struct Classification {
  std::vector<HaraAssignment> assignments;  // one per hazardous event, by id
  std::vector<Finding> findings;
};

Classification classify_model_events(const SafetyModel& model);

/// Traceability gaps along HE -> SG -> FSR -> TSR -> component.
std::vector<Finding> check_concept_coverage(const SafetyModel& model);

}  // namespace asilcheck::hara
