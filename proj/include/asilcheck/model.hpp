#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "asilcheck/asil.hpp"
#include "asilcheck/scheme_table.hpp"

namespace asilcheck {

/// Model file schema version understood by this build.
inline constexpr std::string_view kModelSchemaVersion = "1.0";

struct Meta {
  std::string schema_version;
  std::string item;  // id of the item under analysis; shares the id namespace
  std::optional<std::string> description;
};

struct HazardousEvent {
  std::string id;
  std::string description;
  std::string scenario;
  int exposure = 0;         // E0..E4
  int severity = 0;         // S0..S3
  int controllability = 0;  // C0..C3
  std::optional<AsilLevel> declared_asil;
};

struct SafetyGoal {
  std::string id;
  std::string text;
  std::vector<std::string> hazardous_event_ids;
  std::optional<std::string> safe_state;
  std::optional<AsilLevel> declared_asil;
};

enum class RequirementKind { fsr, tsr };

constexpr std::string_view to_string(RequirementKind kind) noexcept {
  return kind == RequirementKind::fsr ? "FSR" : "TSR";
}

struct Requirement {
  std::string id;
  RequirementKind kind = RequirementKind::fsr;
  std::optional<std::string> text;
  std::vector<std::string> parent_ids;  // FSR: safety goals, TSR: FSRs
  std::optional<std::string> decomposition_group_id;
  std::vector<std::string> allocated_to;  // hw/sw component ids
  std::optional<AsilLevel> declared_asil;
};

struct DecompositionGroup {
  std::string id;
  std::string parent_id;  // safety goal or requirement being decomposed
  std::vector<std::string> member_ids;
  std::string independence_evidence;
  std::map<std::string, AsilLevel> member_target_asils;
};

/// Failure rates in FIT (failures per 1e9 h).
struct FaultEntry {
  double safety_related_fit = 0.0;
  double non_safety_related_fit = 0.0;
  std::optional<std::string> mechanism_id;

  friend auto operator<=>(const FaultEntry&, const FaultEntry&) = default;
};

struct Seooc {
  double subsumed_fit = 0.0;
};

struct HwComponent {
  std::string id;
  std::optional<std::string> ecu_id;
  std::vector<FaultEntry> fault_data;
  std::optional<Seooc> seooc;

  bool has_fault_model() const noexcept { return seooc.has_value() || !fault_data.empty(); }
};

struct SafetyMechanism {
  std::string id;
  double dc = 0.0;
  std::optional<double> latent_dc;

  double latent_dc_or_zero() const noexcept { return latent_dc.value_or(0.0); }
};

struct SwComponent {
  std::string id;
  std::string ecu_id;
  std::optional<std::string> partition_id;
  bool external = false;
  std::optional<AsilLevel> developed_to_asil;
};

struct Partition {
  std::string id;
  bool memory_protection = false;
  bool timing_watchdog = false;

  /// Both spatial and temporal isolation are needed for freedom from interference.
  bool isolates() const noexcept { return memory_protection && timing_watchdog; }
};

struct Ecu {
  std::string id;
  std::vector<Partition> partitions;
};

struct Channel {
  std::string id;
  std::string from_swc;
  std::string to_swc;
  bool e2e_protected = false;
};

struct Tool {
  std::string id;
  bool can_introduce_errors = false;
  bool qualified = false;
  std::vector<std::string> used_for;
};

struct ProvenInUseEvidence {
  std::string element_id;
  std::int64_t incidents = 0;
  double service_hours = 0.0;
};

enum class PiuEstimator { point, conservative };

constexpr std::string_view to_string(PiuEstimator estimator) noexcept {
  return estimator == PiuEstimator::point ? "point" : "conservative";
}

struct Config {
  SchemeTable decomposition_schemes = SchemeTable::defaults();
  std::map<AsilLevel, double> pmhf_targets_fit = {
      {AsilLevel::B, 100.0}, {AsilLevel::C, 100.0}, {AsilLevel::D, 10.0}};
  std::map<AsilLevel, double> spfm_targets = {
      {AsilLevel::B, 0.90}, {AsilLevel::C, 0.97}, {AsilLevel::D, 0.99}};
  std::map<AsilLevel, double> lfm_targets = {
      {AsilLevel::B, 0.60}, {AsilLevel::C, 0.80}, {AsilLevel::D, 0.90}};
  PiuEstimator proven_in_use_estimator = PiuEstimator::point;
};

enum class EntityKind {
  item,
  hazardous_event,
  safety_goal,
  requirement,
  decomposition_group,
  hw_component,
  mechanism,
  sw_component,
  ecu,
  partition,
  channel,
  tool,
};

std::string_view to_string(EntityKind kind) noexcept;

/// Immutable, fully validated model of one item. Every entity list is
/// sorted by id (evidence by element id), so iteration order never depends
/// on the order of the source document.
class SafetyModel {
 public:
  const Meta& meta() const noexcept { return meta_; }
  const std::vector<HazardousEvent>& hazardous_events() const noexcept { return hazardous_events_; }
  const std::vector<SafetyGoal>& safety_goals() const noexcept { return safety_goals_; }
  const std::vector<Requirement>& requirements() const noexcept { return requirements_; }
  const std::vector<DecompositionGroup>& decomposition_groups() const noexcept { return groups_; }
  const std::vector<HwComponent>& hw_components() const noexcept { return hw_components_; }
  const std::vector<SafetyMechanism>& mechanisms() const noexcept { return mechanisms_; }
  const std::vector<SwComponent>& sw_components() const noexcept { return sw_components_; }
  const std::vector<Ecu>& ecus() const noexcept { return ecus_; }
  const std::vector<Channel>& channels() const noexcept { return channels_; }
  const std::vector<Tool>& tools() const noexcept { return tools_; }
  const std::vector<ProvenInUseEvidence>& evidence() const noexcept { return evidence_; }
  const Config& config() const noexcept { return config_; }

  /// Hex SHA-256 of the canonical serialization.
  const std::string& content_hash() const noexcept { return content_hash_; }

  std::optional<EntityKind> kind_of(std::string_view id) const;

  const HazardousEvent* find_hazardous_event(std::string_view id) const;
  const SafetyGoal* find_safety_goal(std::string_view id) const;
  const Requirement* find_requirement(std::string_view id) const;
  const DecompositionGroup* find_decomposition_group(std::string_view id) const;
  const HwComponent* find_hw_component(std::string_view id) const;
  const SafetyMechanism* find_mechanism(std::string_view id) const;
  const SwComponent* find_sw_component(std::string_view id) const;
  const Partition* find_partition(std::string_view id) const;

  /// Requirements listing `id` (a goal or a requirement) as a parent, sorted.
  const std::vector<std::string>& children_of(std::string_view id) const;

  /// Every requirement reachable below a safety goal, sorted.
  std::vector<std::string> requirements_under(std::string_view goal_id) const;

  /// Hardware components allocated by any requirement below a safety goal, sorted.
  std::vector<std::string> hw_components_for_goal(std::string_view goal_id) const;

 private:
  friend class ModelParser;

  struct EntityRef {
    EntityKind kind;
    std::size_t index;
    std::size_t sub = 0;
  };

  Meta meta_;
  std::vector<HazardousEvent> hazardous_events_;
  std::vector<SafetyGoal> safety_goals_;
  std::vector<Requirement> requirements_;
  std::vector<DecompositionGroup> groups_;
  std::vector<HwComponent> hw_components_;
  std::vector<SafetyMechanism> mechanisms_;
  std::vector<SwComponent> sw_components_;
  std::vector<Ecu> ecus_;
  std::vector<Channel> channels_;
  std::vector<Tool> tools_;
  std::vector<ProvenInUseEvidence> evidence_;
  Config config_;
  std::string content_hash_;

  std::map<std::string, EntityRef, std::less<>> index_;
  std::map<std::string, std::vector<std::string>, std::less<>> children_;
};

/// Parses and validates a model document. Throws Error on any syntax,
/// duplicate id, dangling reference, range, cycle or structural problem.
SafetyModel parse_model(std::string_view document);

SafetyModel load_model(const std::filesystem::path& path);

/// Canonical form: sorted keys and entities, shortest round-trip numbers,
/// optional fields omitted when empty, newline-terminated.
std::string serialize_model(const SafetyModel& model);

}  // namespace asilcheck
