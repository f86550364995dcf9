#include "asilcheck/sw_process.hpp"

#include <fmt/core.h>

#include "asilcheck/error.hpp"
#include "asilcheck/hw_metrics.hpp"

namespace asilcheck::sw {

namespace {

AsilLevel level_of(const propagation::AsilMap& effective, const std::string& id) {
  auto it = effective.find(id);
  return it == effective.end() ? AsilLevel::QM : it->second.effective;
}

}  // namespace

std::optional<double> proven_in_use_threshold(AsilLevel level) noexcept {
  switch (level) {
    case AsilLevel::D: return 1.0;
    case AsilLevel::C: return 10.0;
    case AsilLevel::B: return 100.0;
    case AsilLevel::A: return 1000.0;
    case AsilLevel::QM: return std::nullopt;
  }
  return std::nullopt;
}

AsilLevel max_asil_supported(double observed_fit) noexcept {
  for (AsilLevel level : {AsilLevel::D, AsilLevel::C, AsilLevel::B, AsilLevel::A}) {
    if (observed_fit < *proven_in_use_threshold(level)) return level;
  }
  return AsilLevel::QM;
}

PiuVerdict proven_in_use_check(const ProvenInUseEvidence& evidence, AsilLevel target, PiuEstimator estimator) {
  if (!(evidence.service_hours > 0.0)) {
    throw Error(ErrorKind::non_positive_hours, evidence.element_id, "evidence",
                "service hours must be positive");
  }
  PiuVerdict verdict;
  verdict.element_id = evidence.element_id;
  verdict.estimator = estimator;
  verdict.target = target;
  const std::int64_t counted = evidence.incidents + (estimator == PiuEstimator::conservative ? 1 : 0);
  verdict.observed_fit = hw::fit_from_observation(counted, evidence.service_hours);
  verdict.threshold = proven_in_use_threshold(target);
  verdict.max_asil_supported = max_asil_supported(verdict.observed_fit);
  verdict.passed = !verdict.threshold || verdict.observed_fit < *verdict.threshold;
  verdict.pass_for = std::min(target, verdict.max_asil_supported);
  if (estimator == PiuEstimator::point) {
    verdict.note = "point estimate k/T without a statistical confidence bound";
  }
  return verdict;
}

std::vector<PiuVerdict> proven_in_use_verdicts(const SafetyModel& model, const propagation::AsilMap& effective) {
  std::vector<PiuVerdict> out;
  for (const auto& evidence : model.evidence()) {
    out.push_back(proven_in_use_check(evidence, level_of(effective, evidence.element_id),
                                      model.config().proven_in_use_estimator));
  }
  return out;
}

std::vector<Finding> tool_qualification_check(const SafetyModel& model, const propagation::AsilMap& effective) {
  std::vector<Finding> findings;
  for (const auto& tool : model.tools()) {
    if (!tool.can_introduce_errors || tool.qualified) continue;
    std::string affected;
    AsilLevel highest = AsilLevel::QM;
    for (const auto& element : tool.used_for) {
      AsilLevel level = level_of(effective, element);
      if (level >= AsilLevel::A) {
        affected += (affected.empty() ? "'" : ", '") + element + "' (" + std::string(to_string(level)) + ")";
        highest = std::max(highest, level);
      }
    }
    if (!affected.empty()) {
      findings.push_back(make_finding("unqualified-tool", tool.id,
                                      "unqualified tool that can introduce errors is used for ASIL " +
                                          std::string(to_string(highest)) + " element(s) " + affected));
    }
  }
  return findings;
}

std::vector<Finding> external_component_check(const SafetyModel& model, const propagation::AsilMap& effective) {
  std::vector<Finding> findings;
  for (const auto& component : model.sw_components()) {
    if (!component.external) continue;
    const AsilLevel used_at = level_of(effective, component.id);
    const AsilLevel developed_to = component.developed_to_asil.value_or(AsilLevel::QM);
    if (used_at <= developed_to) continue;

    bool proven = false;
    for (const auto& evidence : model.evidence()) {
      if (evidence.element_id == component.id &&
          proven_in_use_check(evidence, used_at, model.config().proven_in_use_estimator).passed) {
        proven = true;
      }
    }
    if (!proven) {
      findings.push_back(make_finding(
          "unsafe-external-component", component.id,
          fmt::format("external component developed to {} is used at ASIL {} without a passing proven-in-use "
                      "argument",
                      developed_to == AsilLevel::QM ? std::string("QM") : "ASIL " + std::string(to_string(developed_to)),
                      to_string(used_at))));
    }
  }
  return findings;
}

}  // namespace asilcheck::sw
