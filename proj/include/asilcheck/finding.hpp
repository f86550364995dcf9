#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace asilcheck {

enum class Severity { info = 0, warning = 1, error = 2 };

constexpr std::string_view to_string(Severity severity) noexcept {
  switch (severity) {
    case Severity::info: return "info";
    case Severity::warning: return "warning";
    case Severity::error: return "error";
  }
  return "info";
}

std::optional<Severity> parse_severity(std::string_view text) noexcept;

/// One entry of the rule catalog. `anchor` names the ISO 26262 clause the
/// rule enforces.
struct RuleInfo {
  std::string_view rule_id;
  Severity severity;
  std::string_view anchor;
  std::string_view description;
};

std::span<const RuleInfo> rule_catalog() noexcept;

/// Throws std::out_of_range for ids missing from the catalog.
const RuleInfo& rule_info(std::string_view rule_id);

struct Finding {
  std::string rule_id;
  Severity severity = Severity::info;
  std::string subject_id;
  std::string message;
  std::string anchor;

  friend bool operator==(const Finding&, const Finding&) = default;
};

/// Severity and anchor come from the catalog entry for `rule_id`.
Finding make_finding(std::string_view rule_id, std::string subject_id, std::string message);

/// Report order: severity descending, then rule id, subject id, message.
bool finding_less(const Finding& a, const Finding& b);

void sort_findings(std::vector<Finding>& findings);

}  // namespace asilcheck
