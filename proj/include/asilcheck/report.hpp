#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "asilcheck/finding.hpp"
#include "asilcheck/hara.hpp"
#include "asilcheck/hw_metrics.hpp"
#include "asilcheck/model.hpp"
#include "asilcheck/propagation.hpp"
#include "asilcheck/sw_process.hpp"

namespace asilcheck {

inline constexpr std::string_view kReportSchemaVersion = "1.0";

struct Summary {
  int errors = 0;
  int warnings = 0;
  int infos = 0;

  friend bool operator==(const Summary&, const Summary&) = default;
};

struct Report {
  std::string schema_version{kReportSchemaVersion};
  std::string item;
  std::string model_content_hash;
  std::vector<Finding> findings;  // sorted, see finding_less
  std::vector<hara::HaraAssignment> hara;
  std::vector<propagation::EffectiveAsil> effective_asils;  // by element id, after lift-up
  std::vector<hw::PmhfResult> pmhf;
  std::vector<hw::ArchMetrics> arch_metrics;
  std::vector<sw::PiuVerdict> proven_in_use;
  Summary summary;

  friend bool operator==(const Report&, const Report&) = default;
};

/// Runs every analysis in lifecycle order (HARA, concept coverage, ASIL
/// propagation and decomposition, freedom from interference, hardware
/// metrics, software process) and aggregates the results. Rule violations
/// become findings; nothing short of a programming error throws.
Report run_checks(const SafetyModel& model);

enum class ReportFormat { json, text };

/// JSON is canonical: sorted keys, shortest round-trip numbers, trailing newline.
std::string render_report(const Report& report, ReportFormat format);

/// Inverse of render_report(..., json).
Report report_from_json(std::string_view document);

/// 0 when there are no error findings, 1 otherwise. With `strict`, warnings
/// also yield 1.
int exit_code(const Report& report, bool strict = false);

}  // namespace asilcheck
