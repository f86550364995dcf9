#include "asilcheck/report.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

namespace asilcheck {

using nlohmann::json;

namespace {

std::string asil_text(AsilLevel level) { return std::string(to_string(level)); }

AsilLevel asil_from(const json& node) {
  auto level = parse_asil(node.get<std::string>());
  if (!level) throw std::invalid_argument("bad ASIL in report: " + node.dump());
  return *level;
}

json effective_to_json(const propagation::EffectiveAsil& e) {
  json out = {{"element_id", e.element_id}, {"effective", asil_text(e.effective)}, {"provenance", e.provenance}};
  if (e.origin) {
    out["origin"] = asil_text(*e.origin);
    out["notation"] = decomposed_notation(e.effective, e.origin);
  }
  return out;
}

json to_json(const Report& report) {
  json findings = json::array();
  for (const auto& f : report.findings) {
    findings.push_back({{"rule_id", f.rule_id},
                        {"severity", to_string(f.severity)},
                        {"subject_id", f.subject_id},
                        {"message", f.message},
                        {"anchor", f.anchor}});
  }

  json hara = json::array();
  for (const auto& a : report.hara) {
    hara.push_back({{"hazardous_event_id", a.hazardous_event_id},
                    {"sum", a.sum},
                    {"computed_asil", asil_text(a.computed_asil)},
                    {"zero_summand", a.zero_summand}});
  }

  json effective = json::array();
  for (const auto& e : report.effective_asils) effective.push_back(effective_to_json(e));

  json pmhf = json::array();
  for (const auto& p : report.pmhf) {
    json item = {{"safety_goal_id", p.safety_goal_id},
                 {"asil", asil_text(p.asil)},
                 {"analytic_fit", p.analytic_fit},
                 {"contributions", p.contributions},
                 {"pass", p.pass}};
    if (p.target) item["target_fit"] = *p.target;
    pmhf.push_back(std::move(item));
  }

  json arch = json::array();
  for (const auto& a : report.arch_metrics) {
    json item = {{"safety_goal_id", a.safety_goal_id},
                 {"asil", asil_text(a.asil)},
                 {"spfm", a.spfm},
                 {"lfm", a.lfm},
                 {"spfm_pass", a.spfm_pass},
                 {"lfm_pass", a.lfm_pass}};
    if (a.spfm_target) item["spfm_target"] = *a.spfm_target;
    if (a.lfm_target) item["lfm_target"] = *a.lfm_target;
    if (!a.notes.empty()) item["notes"] = a.notes;
    arch.push_back(std::move(item));
  }

  json piu = json::array();
  for (const auto& v : report.proven_in_use) {
    json item = {{"element_id", v.element_id},
                 {"observed_fit", v.observed_fit},
                 {"estimator", to_string(v.estimator)},
                 {"target", asil_text(v.target)},
                 {"max_asil_supported", asil_text(v.max_asil_supported)},
                 {"pass_for", asil_text(v.pass_for)},
                 {"passed", v.passed}};
    if (v.threshold) item["threshold_fit"] = *v.threshold;
    if (v.note) item["note"] = *v.note;
    piu.push_back(std::move(item));
  }

  return {{"schema_version", report.schema_version},
          {"model", {{"item", report.item}, {"content_hash", report.model_content_hash}}},
          {"findings", std::move(findings)},
          {"hara", std::move(hara)},
          {"effective_asils", std::move(effective)},
          {"pmhf", std::move(pmhf)},
          {"arch_metrics", std::move(arch)},
          {"proven_in_use", std::move(piu)},
          {"summary",
           {{"errors", report.summary.errors},
            {"warnings", report.summary.warnings},
            {"info", report.summary.infos}}}};
}

template <class T>
std::optional<T> optional_field(const json& node, const char* key) {
  auto it = node.find(key);
  return it == node.end() ? std::nullopt : std::optional<T>(it->get<T>());
}

std::string render_text(const Report& report) {
  std::string out = fmt::format("asilcheck report for item '{}'\nmodel sha256 {}\n", report.item,
                                report.model_content_hash);

  out += fmt::format("\nFindings ({}):\n", report.findings.size());
  for (const auto& f : report.findings) {
    out += fmt::format("  {:<7} {:<26} {}: {}\n", to_string(f.severity), f.rule_id, f.subject_id, f.message);
  }

  if (!report.hara.empty()) {
    out += "\nHazardous events:\n";
    for (const auto& a : report.hara) {
      out += fmt::format("  {}: E+S+C = {}{} -> {}\n", a.hazardous_event_id, a.sum,
                         a.zero_summand ? " (zero rating)" : "", to_string(a.computed_asil));
    }
  }

  if (!report.effective_asils.empty()) {
    out += "\nEffective ASILs:\n";
    for (const auto& e : report.effective_asils) {
      out += fmt::format("  {}: {}\n", e.element_id, decomposed_notation(e.effective, e.origin));
    }
  }

  if (!report.pmhf.empty()) {
    out += "\nPMHF per safety goal:\n";
    for (const auto& p : report.pmhf) {
      out += fmt::format("  {} (ASIL {}): {} fit", p.safety_goal_id, to_string(p.asil), p.analytic_fit);
      out += p.target ? fmt::format(" / target {} fit: {}\n", *p.target, p.pass ? "pass" : "FAIL")
                      : std::string(" (no target)\n");
    }
  }

  if (!report.arch_metrics.empty()) {
    out += "\nArchitectural metrics:\n";
    for (const auto& a : report.arch_metrics) {
      out += fmt::format("  {}: SPFM {}{}, LFM {}{}\n", a.safety_goal_id, a.spfm,
                         a.spfm_target ? fmt::format(" (target {})", *a.spfm_target) : "", a.lfm,
                         a.lfm_target ? fmt::format(" (target {})", *a.lfm_target) : "");
    }
  }

  if (!report.proven_in_use.empty()) {
    out += "\nProven-in-use:\n";
    for (const auto& v : report.proven_in_use) {
      out += fmt::format("  {}: {} fit ({}) supports up to {}; at {}: {}\n", v.element_id, v.observed_fit,
                         to_string(v.estimator), to_string(v.max_asil_supported), to_string(v.target),
                         v.passed ? "pass" : "FAIL");
    }
  }

  out += fmt::format("\n{} info finding(s)\n", report.summary.infos);
  out += fmt::format("{} error(s), {} warning(s)\n", report.summary.errors, report.summary.warnings);
  return out;
}

}  // namespace

Report run_checks(const SafetyModel& model) {
  Report report;
  report.item = model.meta().item;
  report.model_content_hash = model.content_hash();
  auto& findings = report.findings;
  auto append = [&findings](const std::vector<Finding>& more) {
    findings.insert(findings.end(), more.begin(), more.end());
  };

  hara::Classification hara = hara::classify_model_events(model);
  report.hara = hara.assignments;
  append(hara.findings);
  append(hara::check_concept_coverage(model));

  propagation::Propagation propagated = propagation::propagate(model, propagation::OnMissingSource::report);
  append(propagated.findings);

  propagation::FfiResult ffi = propagation::ffi_analysis(model, propagated.effective);
  append(ffi.findings);

  propagation::AsilMap effective = propagated.effective;
  for (const auto& [id, lifted] : ffi.sw_effective) effective.insert_or_assign(id, lifted);

  hw::HwBudgets budgets = hw::check_hw_budgets(model, propagated.effective);
  report.pmhf = std::move(budgets.pmhf);
  report.arch_metrics = std::move(budgets.arch);
  append(budgets.findings);

  // Tools may be used for any element, hazardous events included.
  propagation::AsilMap lookup = effective;
  for (const auto& a : report.hara) {
    lookup.emplace(a.hazardous_event_id, propagation::EffectiveAsil{a.hazardous_event_id, a.computed_asil, std::nullopt, {}});
  }
  report.proven_in_use = sw::proven_in_use_verdicts(model, lookup);
  append(sw::tool_qualification_check(model, lookup));
  append(sw::external_component_check(model, lookup));

  for (auto& [id, e] : effective) report.effective_asils.push_back(std::move(e));

  sort_findings(findings);
  for (const auto& f : findings) {
    switch (f.severity) {
      case Severity::error: ++report.summary.errors; break;
      case Severity::warning: ++report.summary.warnings; break;
      case Severity::info: ++report.summary.infos; break;
    }
  }
  return report;
}

std::string render_report(const Report& report, ReportFormat format) {
  if (format == ReportFormat::text) return render_text(report);
  return to_json(report).dump(2) + "\n";
}

Report report_from_json(std::string_view document) {
  const json doc = json::parse(document.begin(), document.end());
  Report report;
  report.schema_version = doc.at("schema_version").get<std::string>();
  report.item = doc.at("model").at("item").get<std::string>();
  report.model_content_hash = doc.at("model").at("content_hash").get<std::string>();

  for (const auto& f : doc.at("findings")) {
    auto severity = parse_severity(f.at("severity").get<std::string>());
    if (!severity) throw std::invalid_argument("bad severity in report");
    report.findings.push_back(Finding{f.at("rule_id").get<std::string>(), *severity,
                                      f.at("subject_id").get<std::string>(), f.at("message").get<std::string>(),
                                      f.at("anchor").get<std::string>()});
  }
  for (const auto& a : doc.at("hara")) {
    report.hara.push_back(hara::HaraAssignment{a.at("hazardous_event_id").get<std::string>(), a.at("sum").get<int>(),
                                               asil_from(a.at("computed_asil")), a.at("zero_summand").get<bool>()});
  }
  for (const auto& e : doc.at("effective_asils")) {
    propagation::EffectiveAsil item{e.at("element_id").get<std::string>(), asil_from(e.at("effective")),
                                    std::nullopt, e.at("provenance").get<std::vector<std::string>>()};
    if (e.contains("origin")) item.origin = asil_from(e.at("origin"));
    report.effective_asils.push_back(std::move(item));
  }
  for (const auto& p : doc.at("pmhf")) {
    hw::PmhfResult item;
    item.safety_goal_id = p.at("safety_goal_id").get<std::string>();
    item.asil = asil_from(p.at("asil"));
    item.analytic_fit = p.at("analytic_fit").get<double>();
    item.contributions = p.at("contributions").get<std::map<std::string, double>>();
    item.target = optional_field<double>(p, "target_fit");
    item.pass = p.at("pass").get<bool>();
    report.pmhf.push_back(std::move(item));
  }
  for (const auto& a : doc.at("arch_metrics")) {
    hw::ArchMetrics item;
    item.safety_goal_id = a.at("safety_goal_id").get<std::string>();
    item.asil = asil_from(a.at("asil"));
    item.spfm = a.at("spfm").get<double>();
    item.lfm = a.at("lfm").get<double>();
    item.spfm_target = optional_field<double>(a, "spfm_target");
    item.lfm_target = optional_field<double>(a, "lfm_target");
    item.spfm_pass = a.at("spfm_pass").get<bool>();
    item.lfm_pass = a.at("lfm_pass").get<bool>();
    item.notes = optional_field<std::vector<std::string>>(a, "notes").value_or(std::vector<std::string>{});
    report.arch_metrics.push_back(std::move(item));
  }
  for (const auto& v : doc.at("proven_in_use")) {
    sw::PiuVerdict item;
    item.element_id = v.at("element_id").get<std::string>();
    item.observed_fit = v.at("observed_fit").get<double>();
    item.estimator = v.at("estimator").get<std::string>() == "point" ? PiuEstimator::point : PiuEstimator::conservative;
    item.target = asil_from(v.at("target"));
    item.threshold = optional_field<double>(v, "threshold_fit");
    item.max_asil_supported = asil_from(v.at("max_asil_supported"));
    item.pass_for = asil_from(v.at("pass_for"));
    item.passed = v.at("passed").get<bool>();
    item.note = optional_field<std::string>(v, "note");
    report.proven_in_use.push_back(std::move(item));
  }
  const json& summary = doc.at("summary");
  report.summary = Summary{summary.at("errors").get<int>(), summary.at("warnings").get<int>(),
                           summary.at("info").get<int>()};
  return report;
}

int exit_code(const Report& report, bool strict) {
  if (report.summary.errors > 0) return 1;
  if (strict && report.summary.warnings > 0) return 1;
  return 0;
}

}  // namespace asilcheck
