#include "asilcheck/finding.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <tuple>

namespace asilcheck {

namespace {

constexpr std::array kCatalog{
    RuleInfo{"asil-lift-up", Severity::warning, "ISO 26262-6:2011 Annex D",
             "Co-located software components without freedom from interference are raised to the highest "
             "ASIL on the ECU."},
    RuleInfo{"declared-asil-mismatch", Severity::error, "ISO 26262-3:2011 clause 7",
             "A declared ASIL differs from the ASIL computed from the model."},
    RuleInfo{"decomposition-applied", Severity::info, "ISO 26262-9:2011 clause 5",
             "A valid ASIL decomposition lowered the ASIL of its member requirements."},
    RuleInfo{"fsr-without-tsr", Severity::error, "ISO 26262-4:2011 clause 6",
             "A functional safety requirement is not refined by any technical safety requirement."},
    RuleInfo{"goal-without-fsr", Severity::error, "ISO 26262-3:2011 clause 8",
             "A safety goal has no functional safety requirement."},
    RuleInfo{"invalid-decomposition", Severity::error, "ISO 26262-9:2011 clause 5",
             "An ASIL decomposition lacks independence evidence or uses a scheme not in the table; members "
             "keep the undecomposed ASIL."},
    RuleInfo{"lfm-below-target", Severity::warning, "ISO 26262-5:2011 clause 8",
             "The latent fault metric of a safety goal is below its target."},
    RuleInfo{"missing-asil-source", Severity::error, "ISO 26262-3:2011 clause 8",
             "A requirement has neither parents nor a declared ASIL."},
    RuleInfo{"missing-fault-data", Severity::error, "ISO 26262-5:2011 clause 9",
             "A hardware component allocated to an ASIL B or higher safety goal has neither fault data nor an "
             "SEooC budget."},
    RuleInfo{"no-hazardous-events", Severity::warning, "ISO 26262-3:2011 clause 7",
             "The model contains no hazardous events."},
    RuleInfo{"pmhf-exceeded", Severity::error, "ISO 26262-5:2011 clause 9",
             "The PMHF of a safety goal exceeds the target for its ASIL."},
    RuleInfo{"spfm-below-target", Severity::warning, "ISO 26262-5:2011 clause 8",
             "The single-point fault metric of a safety goal is below its target."},
    RuleInfo{"tsr-without-allocation", Severity::error, "ISO 26262-4:2011 clause 6",
             "A technical safety requirement is not allocated to any component."},
    RuleInfo{"uncovered-hazardous-event", Severity::error, "ISO 26262-3:2011 clause 7",
             "A hazardous event rated ASIL A or higher is not addressed by any safety goal."},
    RuleInfo{"unprotected-channel", Severity::error, "ISO 26262-6:2011 Annex D",
             "A channel between software components on different ECUs carries ASIL data without end-to-end "
             "protection."},
    RuleInfo{"unqualified-tool", Severity::error, "ISO 26262-8:2011 clause 11",
             "A tool that can introduce errors is used on ASIL elements without qualification."},
    RuleInfo{"unsafe-external-component", Severity::error, "ISO 26262-8:2011 clauses 12 and 14",
             "An external component is used above the ASIL it was developed to, with no passing proven-in-use "
             "argument."},
};

}  // namespace

std::optional<Severity> parse_severity(std::string_view text) noexcept {
  for (Severity severity : {Severity::info, Severity::warning, Severity::error}) {
    if (to_string(severity) == text) return severity;
  }
  return std::nullopt;
}

std::span<const RuleInfo> rule_catalog() noexcept { return kCatalog; }

const RuleInfo& rule_info(std::string_view rule_id) {
  for (const RuleInfo& rule : kCatalog) {
    if (rule.rule_id == rule_id) return rule;
  }
  throw std::out_of_range("unknown rule id: " + std::string(rule_id));
}

Finding make_finding(std::string_view rule_id, std::string subject_id, std::string message) {
  const RuleInfo& rule = rule_info(rule_id);
  return Finding{std::string(rule.rule_id), rule.severity, std::move(subject_id), std::move(message),
                 std::string(rule.anchor)};
}

bool finding_less(const Finding& a, const Finding& b) {
  return std::forward_as_tuple(b.severity, a.rule_id, a.subject_id, a.message) <
         std::forward_as_tuple(a.severity, b.rule_id, b.subject_id, b.message);
}

void sort_findings(std::vector<Finding>& findings) { std::sort(findings.begin(), findings.end(), finding_less); }

}  // namespace asilcheck
