#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asilcheck/asil.hpp"
#include "asilcheck/finding.hpp"
#include "asilcheck/model.hpp"
#include "asilcheck/scheme_table.hpp"

namespace asilcheck::propagation {

/// ASIL an element ends up with. `origin` is the pre-decomposition level
/// ("B(D)" has effective B, origin D); it is informational only and never
/// feeds a max computation.
struct EffectiveAsil {
  std::string element_id;
  AsilLevel effective = AsilLevel::QM;
  std::optional<AsilLevel> origin;
  std::vector<std::string> provenance;  // contributing parents / allocating requirements

  friend bool operator==(const EffectiveAsil&, const EffectiveAsil&) = default;
};

using AsilMap = std::map<std::string, EffectiveAsil, std::less<>>;

struct DecompositionVerdict {
  std::string group_id;
  bool valid = false;
  AsilLevel parent_effective = AsilLevel::QM;
  std::vector<Finding> findings;
};

/// Valid iff the group carries independence evidence and its member target
/// multiset is listed in `table` for `parent_effective`.
DecompositionVerdict validate_decomposition(const DecompositionGroup& group, const SchemeTable& table,
                                            AsilLevel parent_effective);

enum class OnMissingSource {
  fail,    // throw Error(missing_asil_source)
  report,  // emit a missing-asil-source finding and treat the requirement as QM
};

struct Propagation {
  AsilMap effective;  // safety goals, requirements, hw and sw components
  std::vector<DecompositionVerdict> decompositions;
  std::vector<Finding> findings;
};

/// Max-of-parents inheritance from safety goals down to components.
/// Safety goals take the max over their hazardous events; a requirement in a
/// valid decomposition group takes its target level instead.
Propagation propagate(const SafetyModel& model, OnMissingSource on_missing = OnMissingSource::fail);

struct FfiResult {
  AsilMap sw_effective;  // every software component, after lift-up
  std::vector<Finding> findings;
};

/// Freedom-from-interference analysis. Software components on one ECU that
/// are not pairwise separated by isolating partitions form a group lifted to
/// the group's max ASIL; cross-ECU channels carrying ASIL data need
/// end-to-end protection.
FfiResult ffi_analysis(const SafetyModel& model, const AsilMap& propagated);

}  // namespace asilcheck::propagation
