#include "asilcheck/hara.hpp"

#include <algorithm>
#include <set>

#include "asilcheck/error.hpp"

namespace asilcheck::hara {

namespace {

void require_rating(int value, int max, const char* name) {
  if (value < 0 || value > max) {
    throw Error(ErrorKind::range_violation, std::to_string(value), name,
                std::string(name) + " rating must lie in [0, " + std::to_string(max) + "]");
  }
}

}  // namespace

AsilLevel classify_asil(int exposure, int severity, int controllability) {
  require_rating(exposure, 4, "exposure");
  require_rating(severity, 3, "severity");
  require_rating(controllability, 3, "controllability");

  if (std::min({exposure, severity, controllability}) == 0) {
    return AsilLevel::QM;
  }
  switch (exposure + severity + controllability) {
    case 10: return AsilLevel::D;
    case 9: return AsilLevel::C;
    case 8: return AsilLevel::B;
    case 7: return AsilLevel::A;
    default: return AsilLevel::QM;
  }
}

Classification classify_model_events(const SafetyModel& model) {
  Classification out;
  if (model.hazardous_events().empty()) {
    out.findings.push_back(make_finding("no-hazardous-events", model.meta().item,
                                        "item '" + model.meta().item + "' has no hazardous events to classify"));
    return out;
  }
  for (const auto& he : model.hazardous_events()) {
    HaraAssignment assignment;
    assignment.hazardous_event_id = he.id;
    assignment.sum = he.exposure + he.severity + he.controllability;
    assignment.zero_summand = std::min({he.exposure, he.severity, he.controllability}) == 0;
    assignment.computed_asil = classify_asil(he.exposure, he.severity, he.controllability);
    if (he.declared_asil && *he.declared_asil != assignment.computed_asil) {
      out.findings.push_back(make_finding(
          "declared-asil-mismatch", he.id,
          "declared ASIL " + std::string(to_string(*he.declared_asil)) + " but E" + std::to_string(he.exposure) +
              " S" + std::to_string(he.severity) + " C" + std::to_string(he.controllability) + " gives " +
              std::string(to_string(assignment.computed_asil))));
    }
    out.assignments.push_back(std::move(assignment));
  }
  return out;
}

std::vector<Finding> check_concept_coverage(const SafetyModel& model) {
  std::vector<Finding> findings;

  std::set<std::string> covered;
  for (const auto& sg : model.safety_goals()) {
    covered.insert(sg.hazardous_event_ids.begin(), sg.hazardous_event_ids.end());
  }
  for (const auto& he : model.hazardous_events()) {
    AsilLevel level = classify_asil(he.exposure, he.severity, he.controllability);
    if (level >= AsilLevel::A && !covered.contains(he.id)) {
      findings.push_back(make_finding("uncovered-hazardous-event", he.id,
                                      "ASIL " + std::string(to_string(level)) +
                                          " hazardous event is not addressed by any safety goal"));
    }
  }

  for (const auto& sg : model.safety_goals()) {
    if (model.children_of(sg.id).empty()) {
      findings.push_back(make_finding("goal-without-fsr", sg.id, "safety goal has no functional safety requirement"));
    }
  }

  for (const auto& req : model.requirements()) {
    if (req.kind == RequirementKind::fsr) {
      const auto& children = model.children_of(req.id);
      bool refined = std::any_of(children.begin(), children.end(), [&](const std::string& child) {
        return model.find_requirement(child)->kind == RequirementKind::tsr;
      });
      if (!refined) {
        findings.push_back(
            make_finding("fsr-without-tsr", req.id, "functional safety requirement has no technical refinement"));
      }
    } else if (req.allocated_to.empty()) {
      findings.push_back(make_finding("tsr-without-allocation", req.id,
                                      "technical safety requirement is not allocated to a component"));
    }
  }
  return findings;
}

}  // namespace asilcheck::hara
