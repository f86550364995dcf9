#include "asilcheck/hw_metrics.hpp"

#include <algorithm>
#include <set>

#include <fmt/core.h>

#include "asilcheck/error.hpp"

namespace asilcheck::hw {

namespace {

AsilLevel goal_asil(const SafetyGoal& goal, const propagation::AsilMap& propagated) {
  auto it = propagated.find(goal.id);
  return it == propagated.end() ? AsilLevel::QM : it->second.effective;
}

std::optional<double> target_for(const std::map<AsilLevel, double>& targets, AsilLevel level) {
  auto it = targets.find(level);
  return it == targets.end() ? std::nullopt : std::optional<double>(it->second);
}

void require_fault_model(const HwComponent& component, const SafetyGoal& goal, AsilLevel level) {
  if (!component.has_fault_model() && level >= AsilLevel::B) {
    throw Error(ErrorKind::missing_fault_data, component.id, "hw_components[" + component.id + "]",
                "allocated to ASIL " + std::string(to_string(level)) + " goal '" + goal.id +
                    "' without fault_data or seooc");
  }
}

}  // namespace

double fit_from_observation(std::int64_t failures, double hours) {
  if (!(hours > 0.0)) {
    throw Error(ErrorKind::non_positive_hours, fmt::format("{}", hours), "", "observation hours must be positive");
  }
  if (failures < 0) {
    throw Error(ErrorKind::range_violation, std::to_string(failures), "", "failure count must be >= 0");
  }
  return static_cast<double>(failures) * kHoursPerFitUnit / hours;
}

double residual_fit(const SafetyModel& model, const FaultEntry& entry) {
  double dc = 0.0;
  if (entry.mechanism_id) {
    dc = model.find_mechanism(*entry.mechanism_id)->dc;
  }
  return entry.safety_related_fit * (1.0 - dc);
}

double component_residual_fit(const SafetyModel& model, const HwComponent& component) {
  if (component.seooc) {
    return component.seooc->subsumed_fit;
  }
  double total = 0.0;
  for (const auto& entry : component.fault_data) total += residual_fit(model, entry);
  return total;
}

PmhfResult pmhf(const SafetyModel& model, const SafetyGoal& goal, const propagation::AsilMap& propagated) {
  PmhfResult result;
  result.safety_goal_id = goal.id;
  result.asil = goal_asil(goal, propagated);
  for (const auto& component_id : model.hw_components_for_goal(goal.id)) {
    const HwComponent& component = *model.find_hw_component(component_id);
    require_fault_model(component, goal, result.asil);
    result.contributions[component_id] = component_residual_fit(model, component);
  }
  for (const auto& [id, fit] : result.contributions) result.analytic_fit += fit;
  result.target = target_for(model.config().pmhf_targets_fit, result.asil);
  result.pass = !result.target || result.analytic_fit <= *result.target;
  return result;
}

ArchMetrics arch_metrics(const SafetyModel& model, const SafetyGoal& goal, const propagation::AsilMap& propagated) {
  ArchMetrics result;
  result.safety_goal_id = goal.id;
  result.asil = goal_asil(goal, propagated);

  double total = 0.0;           // all safety-related
  double single_point = 0.0;    // uncovered
  double residual = 0.0;        // covered, escaping detection
  double detected = 0.0;        // covered and detected; LFM denominator
  double latent = 0.0;          // detected by the mechanism but not by its latent check
  for (const auto& component_id : model.hw_components_for_goal(goal.id)) {
    const HwComponent& component = *model.find_hw_component(component_id);
    require_fault_model(component, goal, result.asil);
    if (component.seooc) continue;  // opaque; only its PMHF budget counts
    for (const auto& entry : component.fault_data) {
      const double rate = entry.safety_related_fit;
      total += rate;
      if (!entry.mechanism_id) {
        single_point += rate;
        continue;
      }
      const SafetyMechanism& mechanism = *model.find_mechanism(*entry.mechanism_id);
      residual += rate * (1.0 - mechanism.dc);
      detected += rate * mechanism.dc;
      latent += rate * mechanism.dc * (1.0 - mechanism.latent_dc_or_zero());
    }
  }

  if (total > 0.0) {
    result.spfm = std::clamp(1.0 - (single_point + residual) / total, 0.0, 1.0);
  } else {
    result.notes.push_back("no safety-related failure rate; SPFM reported as 1");
  }
  if (detected > 0.0) {
    result.lfm = std::clamp(1.0 - latent / detected, 0.0, 1.0);
  } else {
    result.notes.push_back("no detected multi-point failure rate; LFM reported as 1");
  }

  result.spfm_target = target_for(model.config().spfm_targets, result.asil);
  result.lfm_target = target_for(model.config().lfm_targets, result.asil);
  result.spfm_pass = !result.spfm_target || result.spfm >= *result.spfm_target;
  result.lfm_pass = !result.lfm_target || result.lfm >= *result.lfm_target;
  return result;
}

HwBudgets check_hw_budgets(const SafetyModel& model, const propagation::AsilMap& propagated) {
  HwBudgets out;
  std::map<std::string, std::vector<std::string>> missing;  // component -> goals

  for (const auto& goal : model.safety_goals()) {
    const AsilLevel level = goal_asil(goal, propagated);
    bool complete = true;
    if (level >= AsilLevel::B) {
      for (const auto& component_id : model.hw_components_for_goal(goal.id)) {
        if (!model.find_hw_component(component_id)->has_fault_model()) {
          missing[component_id].push_back(goal.id);
          complete = false;
        }
      }
    }
    if (!complete) continue;

    PmhfResult result = pmhf(model, goal, propagated);
    if (!result.pass) {
      out.findings.push_back(make_finding("pmhf-exceeded", goal.id,
                                          fmt::format("PMHF {} fit exceeds the ASIL {} target of {} fit",
                                                      result.analytic_fit, to_string(level), *result.target)));
    }
    out.pmhf.push_back(std::move(result));

    ArchMetrics metrics = arch_metrics(model, goal, propagated);
    if (!metrics.spfm_pass) {
      out.findings.push_back(make_finding("spfm-below-target", goal.id,
                                          fmt::format("SPFM {} is below the ASIL {} target of {}", metrics.spfm,
                                                      to_string(level), *metrics.spfm_target)));
    }
    if (!metrics.lfm_pass) {
      out.findings.push_back(make_finding("lfm-below-target", goal.id,
                                          fmt::format("LFM {} is below the ASIL {} target of {}", metrics.lfm,
                                                      to_string(level), *metrics.lfm_target)));
    }
    out.arch.push_back(std::move(metrics));
  }

  for (const auto& [component_id, goals] : missing) {
    std::string list;
    for (const auto& goal_id : goals) list += (list.empty() ? "'" : ", '") + goal_id + "'";
    out.findings.push_back(make_finding("missing-fault-data", component_id,
                                        "no fault_data or seooc, but allocated to safety goal(s) " + list +
                                            "; their hardware metrics were skipped"));
  }
  return out;
}

}  // namespace asilcheck::hw
