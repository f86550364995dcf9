#include "asilcheck/model.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "asilcheck/error.hpp"

namespace asilcheck {

using nlohmann::json;

namespace {

[[noreturn]] void fail(ErrorKind kind, std::string subject, std::string location, const std::string& message) {
  throw Error(kind, std::move(subject), std::move(location), message);
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0x0f];
  }
  return out;
}

// Field access on one JSON object. Remembers which keys were read so that
// finish() can reject unknown ones (typos must not silently drop data).
class ObjectReader {
 public:
  ObjectReader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) {
      fail(ErrorKind::syntax, "", path_, "expected an object");
    }
  }

  const std::string& path() const noexcept { return path_; }
  std::string at(std::string_view key) const { return path_ + "." + std::string(key); }
  void rename(std::string path) { path_ = std::move(path); }

  const json* get(std::string_view key) {
    std::string name{key};
    seen_.insert(name);
    auto it = node_.find(name);
    return it == node_.end() ? nullptr : &*it;
  }

  const json& require(std::string_view key) {
    const json* value = get(key);
    if (value == nullptr) {
      fail(ErrorKind::syntax, "", at(key), "missing required field");
    }
    return *value;
  }

  std::string string(std::string_view key) {
    const json& value = require(key);
    if (!value.is_string()) {
      fail(ErrorKind::syntax, "", at(key), "expected a string");
    }
    return value.get<std::string>();
  }

  std::string id(std::string_view key = "id") {
    std::string out = string(key);
    if (out.empty()) {
      fail(ErrorKind::syntax, "", at(key), "ids must be nonempty");
    }
    return out;
  }

  std::optional<std::string> opt_string(std::string_view key) {
    const json* value = get(key);
    if (value == nullptr) {
      return std::nullopt;
    }
    if (!value->is_string()) {
      fail(ErrorKind::syntax, "", at(key), "expected a string");
    }
    return value->get<std::string>();
  }

  std::string string_or_empty(std::string_view key) { return opt_string(key).value_or(""); }

  bool boolean(std::string_view key) {
    const json& value = require(key);
    if (!value.is_boolean()) {
      fail(ErrorKind::syntax, "", at(key), "expected true or false");
    }
    return value.get<bool>();
  }

  bool opt_boolean(std::string_view key, bool fallback) {
    return get(key) == nullptr ? fallback : boolean(key);
  }

  std::int64_t integer(std::string_view key) {
    const json& value = require(key);
    if (!value.is_number_integer()) {
      fail(ErrorKind::syntax, "", at(key), "expected an integer");
    }
    return value.get<std::int64_t>();
  }

  double number(std::string_view key) {
    const json& value = require(key);
    if (!value.is_number()) {
      fail(ErrorKind::syntax, "", at(key), "expected a number");
    }
    return value.get<double>();
  }

  std::optional<double> opt_number(std::string_view key) {
    return get(key) == nullptr ? std::nullopt : std::optional<double>(number(key));
  }

  std::optional<AsilLevel> opt_asil(std::string_view key) {
    auto text = opt_string(key);
    if (!text) {
      return std::nullopt;
    }
    auto level = parse_asil(*text);
    if (!level) {
      fail(ErrorKind::syntax, *text, at(key), "expected one of QM, A, B, C, D");
    }
    return level;
  }

  std::vector<std::string> id_list(std::string_view key) {
    const json* value = get(key);
    std::vector<std::string> out;
    if (value == nullptr) {
      return out;
    }
    if (!value->is_array()) {
      fail(ErrorKind::syntax, "", at(key), "expected an array of ids");
    }
    std::set<std::string> unique;
    for (const json& entry : *value) {
      if (!entry.is_string() || entry.get_ref<const std::string&>().empty()) {
        fail(ErrorKind::syntax, "", at(key), "expected nonempty id strings");
      }
      const auto& text = entry.get_ref<const std::string&>();
      if (!unique.insert(text).second) {
        fail(ErrorKind::duplicate_id, text, at(key), "id listed twice");
      }
      out.push_back(text);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.contains(key)) {
        fail(ErrorKind::syntax, key, path_, "unknown field '" + key + "'");
      }
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void check_range(std::int64_t value, std::int64_t lo, std::int64_t hi, const std::string& subject,
                 const std::string& location) {
  if (value < lo || value > hi) {
    fail(ErrorKind::range_violation, subject, location,
         "value " + std::to_string(value) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

void check_fit(double value, const std::string& subject, const std::string& location) {
  if (!(value >= 0.0)) {
    fail(ErrorKind::range_violation, subject, location, "FIT values must be non-negative");
  }
}

void check_fraction(double value, const std::string& subject, const std::string& location) {
  if (!(value >= 0.0 && value <= 1.0)) {
    fail(ErrorKind::range_violation, subject, location, "fraction must lie in [0, 1]");
  }
}

AsilLevel asil_key(const std::string& key, const std::string& location) {
  auto level = parse_asil(key);
  if (!level) {
    fail(ErrorKind::syntax, key, location, "expected an ASIL key (QM, A, B, C, D)");
  }
  return *level;
}

template <class T>
void sort_by_id(std::vector<T>& items) {
  std::sort(items.begin(), items.end(), [](const T& a, const T& b) { return a.id < b.id; });
}

json asil_map_to_json(const std::map<AsilLevel, double>& values) {
  json out = json::object();
  for (const auto& [level, value] : values) {
    out[std::string(to_string(level))] = value;
  }
  return out;
}

json to_canonical_json(const SafetyModel& model) {
  json doc = json::object();

  json meta = {{"schema_version", model.meta().schema_version}, {"item", model.meta().item}};
  if (model.meta().description) {
    meta["description"] = *model.meta().description;
  }
  doc["meta"] = std::move(meta);

  auto put_section = [&doc](const char* name, json array) {
    if (!array.empty()) {
      doc[name] = std::move(array);
    }
  };
  auto put_nonempty = [](json& object, const char* key, const auto& value) {
    if (!value.empty()) {
      object[key] = value;
    }
  };

  json events = json::array();
  for (const auto& he : model.hazardous_events()) {
    json e = {{"id", he.id},
              {"exposure", he.exposure},
              {"severity", he.severity},
              {"controllability", he.controllability}};
    put_nonempty(e, "description", he.description);
    put_nonempty(e, "scenario", he.scenario);
    if (he.declared_asil) e["declared_asil"] = to_string(*he.declared_asil);
    events.push_back(std::move(e));
  }
  put_section("hazardous_events", std::move(events));

  json goals = json::array();
  for (const auto& sg : model.safety_goals()) {
    json g = {{"id", sg.id}, {"hazardous_event_ids", sg.hazardous_event_ids}};
    put_nonempty(g, "text", sg.text);
    if (sg.safe_state) g["safe_state"] = *sg.safe_state;
    if (sg.declared_asil) g["declared_asil"] = to_string(*sg.declared_asil);
    goals.push_back(std::move(g));
  }
  put_section("safety_goals", std::move(goals));

  json requirements = json::array();
  for (const auto& req : model.requirements()) {
    json r = {{"id", req.id}, {"kind", to_string(req.kind)}};
    if (req.text) r["text"] = *req.text;
    put_nonempty(r, "parent_ids", req.parent_ids);
    if (req.decomposition_group_id) r["decomposition_group_id"] = *req.decomposition_group_id;
    put_nonempty(r, "allocated_to", req.allocated_to);
    if (req.declared_asil) r["declared_asil"] = to_string(*req.declared_asil);
    requirements.push_back(std::move(r));
  }
  put_section("requirements", std::move(requirements));

  json groups = json::array();
  for (const auto& group : model.decomposition_groups()) {
    json targets = json::object();
    for (const auto& [member, level] : group.member_target_asils) {
      targets[member] = to_string(level);
    }
    json g = {{"id", group.id},
              {"parent_requirement_id", group.parent_id},
              {"member_requirement_ids", group.member_ids},
              {"member_target_asils", std::move(targets)}};
    put_nonempty(g, "independence_evidence", group.independence_evidence);
    groups.push_back(std::move(g));
  }
  put_section("decomposition_groups", std::move(groups));

  json hw = json::array();
  for (const auto& component : model.hw_components()) {
    json c = {{"id", component.id}};
    if (component.ecu_id) c["ecu_id"] = *component.ecu_id;
    json faults = json::array();
    for (const auto& fault : component.fault_data) {
      json f = {{"safety_related_fit", fault.safety_related_fit},
                {"non_safety_related_fit", fault.non_safety_related_fit}};
      if (fault.mechanism_id) f["mechanism_id"] = *fault.mechanism_id;
      faults.push_back(std::move(f));
    }
    put_nonempty(c, "fault_data", faults);
    if (component.seooc) c["seooc"] = {{"subsumed_fit", component.seooc->subsumed_fit}};
    hw.push_back(std::move(c));
  }
  put_section("hw_components", std::move(hw));

  json mechanisms = json::array();
  for (const auto& mechanism : model.mechanisms()) {
    json m = {{"id", mechanism.id}, {"dc", mechanism.dc}};
    if (mechanism.latent_dc) m["latent_dc"] = *mechanism.latent_dc;
    mechanisms.push_back(std::move(m));
  }
  put_section("mechanisms", std::move(mechanisms));

  json sw = json::array();
  for (const auto& component : model.sw_components()) {
    json c = {{"id", component.id}, {"ecu_id", component.ecu_id}};
    if (component.partition_id) c["partition_id"] = *component.partition_id;
    if (component.external) c["external"] = true;
    if (component.developed_to_asil) c["developed_to_asil"] = to_string(*component.developed_to_asil);
    sw.push_back(std::move(c));
  }
  put_section("sw_components", std::move(sw));

  json ecus = json::array();
  for (const auto& ecu : model.ecus()) {
    json e = {{"id", ecu.id}};
    json partitions = json::array();
    for (const auto& partition : ecu.partitions) {
      partitions.push_back({{"id", partition.id},
                            {"memory_protection", partition.memory_protection},
                            {"timing_watchdog", partition.timing_watchdog}});
    }
    put_nonempty(e, "partitions", partitions);
    ecus.push_back(std::move(e));
  }
  put_section("ecus", std::move(ecus));

  json channels = json::array();
  for (const auto& channel : model.channels()) {
    channels.push_back({{"id", channel.id},
                        {"from_swc", channel.from_swc},
                        {"to_swc", channel.to_swc},
                        {"e2e_protected", channel.e2e_protected}});
  }
  put_section("channels", std::move(channels));

  json tools = json::array();
  for (const auto& tool : model.tools()) {
    json t = {{"id", tool.id}, {"can_introduce_errors", tool.can_introduce_errors}, {"qualified", tool.qualified}};
    put_nonempty(t, "used_for", tool.used_for);
    tools.push_back(std::move(t));
  }
  put_section("tools", std::move(tools));

  json evidence = json::array();
  for (const auto& record : model.evidence()) {
    evidence.push_back(
        {{"element_id", record.element_id}, {"incidents", record.incidents}, {"service_hours", record.service_hours}});
  }
  put_section("evidence", std::move(evidence));

  const Config& config = model.config();
  json schemes = json::object();
  for (const auto& [parent, sets] : config.decomposition_schemes.entries()) {
    json options = json::array();
    for (const auto& multiset : sets) {
      json levels = json::array();
      for (AsilLevel level : multiset) levels.push_back(to_string(level));
      options.push_back(std::move(levels));
    }
    schemes[std::string(to_string(parent))] = std::move(options);
  }
  doc["config"] = {{"decomposition_schemes", std::move(schemes)},
                   {"pmhf_targets_fit", asil_map_to_json(config.pmhf_targets_fit)},
                   {"spfm_targets", asil_map_to_json(config.spfm_targets)},
                   {"lfm_targets", asil_map_to_json(config.lfm_targets)},
                   {"proven_in_use_estimator", to_string(config.proven_in_use_estimator)}};
  return doc;
}

}  // namespace

std::string_view to_string(EntityKind kind) noexcept {
  switch (kind) {
    case EntityKind::item: return "item";
    case EntityKind::hazardous_event: return "hazardous event";
    case EntityKind::safety_goal: return "safety goal";
    case EntityKind::requirement: return "requirement";
    case EntityKind::decomposition_group: return "decomposition group";
    case EntityKind::hw_component: return "hardware component";
    case EntityKind::mechanism: return "safety mechanism";
    case EntityKind::sw_component: return "software component";
    case EntityKind::ecu: return "ECU";
    case EntityKind::partition: return "partition";
    case EntityKind::channel: return "channel";
    case EntityKind::tool: return "tool";
  }
  return "entity";
}

// Builds a SafetyModel in stages: read every section, register ids, resolve
// references, reject requirement cycles, then check kinds and structure.
class ModelParser {
 public:
  SafetyModel run(std::string_view document) {
    json doc;
    try {
      doc = json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
      fail(ErrorKind::syntax, "", "byte " + std::to_string(e.byte), e.what());
    }
    ObjectReader root(doc, "$");
    read_meta(root);
    read_array(root, "hazardous_events", [this](ObjectReader& r) { read_hazardous_event(r); });
    read_array(root, "safety_goals", [this](ObjectReader& r) { read_safety_goal(r); });
    read_array(root, "requirements", [this](ObjectReader& r) { read_requirement(r); });
    read_array(root, "decomposition_groups", [this](ObjectReader& r) { read_group(r); });
    read_array(root, "hw_components", [this](ObjectReader& r) { read_hw_component(r); });
    read_array(root, "mechanisms", [this](ObjectReader& r) { read_mechanism(r); });
    read_array(root, "sw_components", [this](ObjectReader& r) { read_sw_component(r); });
    read_array(root, "ecus", [this](ObjectReader& r) { read_ecu(r); });
    read_array(root, "channels", [this](ObjectReader& r) { read_channel(r); });
    read_array(root, "tools", [this](ObjectReader& r) { read_tool(r); });
    read_array(root, "evidence", [this](ObjectReader& r) { read_evidence(r); });
    if (const json* config = root.get("config")) {
      read_config(*config);
    }
    root.finish();

    sort_entities();
    build_index();
    resolve_references();
    reject_requirement_cycles();
    check_kinds();
    check_structure();
    build_children();

    m_.content_hash_ = sha256_hex(serialize_model(m_));
    return std::move(m_);
  }

 private:
  template <class Fn>
  void read_array(ObjectReader& root, const char* section, Fn&& fn) {
    const json* array = root.get(section);
    if (array == nullptr) {
      return;
    }
    if (!array->is_array()) {
      fail(ErrorKind::syntax, "", root.at(section), "expected an array");
    }
    for (std::size_t i = 0; i < array->size(); ++i) {
      ObjectReader reader((*array)[i], std::string(section) + "[" + std::to_string(i) + "]");
      fn(reader);
      reader.finish();
    }
  }

  // Entity path once the id is known: "requirements[FSR-1]".
  static std::string entity_path(const ObjectReader& r, const std::string& id) {
    auto bracket = r.path().find('[');
    return r.path().substr(0, bracket) + "[" + id + "]";
  }

  void read_meta(ObjectReader& root) {
    ObjectReader r(root.require("meta"), "meta");
    m_.meta_.schema_version = r.string("schema_version");
    if (m_.meta_.schema_version != kModelSchemaVersion) {
      fail(ErrorKind::syntax, m_.meta_.schema_version, r.at("schema_version"),
           "unsupported schema_version (this build reads " + std::string(kModelSchemaVersion) + ")");
    }
    m_.meta_.item = r.id("item");
    m_.meta_.description = r.opt_string("description");
    r.finish();
    locations_[m_.meta_.item] = "meta.item";
  }

  void read_hazardous_event(ObjectReader& r) {
    HazardousEvent he;
    he.id = r.id();
    r.rename(entity_path(r, he.id));
    he.description = r.string_or_empty("description");
    he.scenario = r.string_or_empty("scenario");
    auto exposure = r.integer("exposure");
    auto severity = r.integer("severity");
    auto controllability = r.integer("controllability");
    check_range(exposure, 0, 4, he.id, r.at("exposure"));
    check_range(severity, 0, 3, he.id, r.at("severity"));
    check_range(controllability, 0, 3, he.id, r.at("controllability"));
    he.exposure = static_cast<int>(exposure);
    he.severity = static_cast<int>(severity);
    he.controllability = static_cast<int>(controllability);
    he.declared_asil = r.opt_asil("declared_asil");
    note(he.id, r.path());
    m_.hazardous_events_.push_back(std::move(he));
  }

  void read_safety_goal(ObjectReader& r) {
    SafetyGoal sg;
    sg.id = r.id();
    r.rename(entity_path(r, sg.id));
    sg.text = r.string_or_empty("text");
    sg.hazardous_event_ids = r.id_list("hazardous_event_ids");
    if (sg.hazardous_event_ids.empty()) {
      fail(ErrorKind::range_violation, sg.id, r.at("hazardous_event_ids"),
           "a safety goal must address at least one hazardous event");
    }
    sg.safe_state = r.opt_string("safe_state");
    sg.declared_asil = r.opt_asil("declared_asil");
    note(sg.id, r.path());
    m_.safety_goals_.push_back(std::move(sg));
  }

  void read_requirement(ObjectReader& r) {
    Requirement req;
    req.id = r.id();
    r.rename(entity_path(r, req.id));
    const std::string kind = r.string("kind");
    if (kind == "FSR") {
      req.kind = RequirementKind::fsr;
    } else if (kind == "TSR") {
      req.kind = RequirementKind::tsr;
    } else {
      fail(ErrorKind::syntax, kind, r.at("kind"), "requirement kind must be FSR or TSR");
    }
    req.text = r.opt_string("text");
    req.parent_ids = r.id_list("parent_ids");
    req.decomposition_group_id = r.opt_string("decomposition_group_id");
    req.allocated_to = r.id_list("allocated_to");
    req.declared_asil = r.opt_asil("declared_asil");
    if (req.kind == RequirementKind::tsr && req.allocated_to.empty()) {
      fail(ErrorKind::range_violation, req.id, r.at("allocated_to"),
           "a technical safety requirement must be allocated to at least one component");
    }
    note(req.id, r.path());
    m_.requirements_.push_back(std::move(req));
  }

  void read_group(ObjectReader& r) {
    DecompositionGroup group;
    group.id = r.id();
    r.rename(entity_path(r, group.id));
    group.parent_id = r.id("parent_requirement_id");
    group.member_ids = r.id_list("member_requirement_ids");
    if (group.member_ids.size() < 2) {
      fail(ErrorKind::range_violation, group.id, r.at("member_requirement_ids"),
           "a decomposition needs at least two members");
    }
    group.independence_evidence = r.string_or_empty("independence_evidence");
    const json& targets = r.require("member_target_asils");
    if (!targets.is_object()) {
      fail(ErrorKind::syntax, group.id, r.at("member_target_asils"), "expected an object of member id -> ASIL");
    }
    for (const auto& [member, level] : targets.items()) {
      if (!level.is_string() || !parse_asil(level.get<std::string>())) {
        fail(ErrorKind::syntax, member, r.at("member_target_asils"), "expected an ASIL string");
      }
      group.member_target_asils[member] = *parse_asil(level.get<std::string>());
    }
    note(group.id, r.path());
    m_.groups_.push_back(std::move(group));
  }

  void read_hw_component(ObjectReader& r) {
    HwComponent component;
    component.id = r.id();
    r.rename(entity_path(r, component.id));
    component.ecu_id = r.opt_string("ecu_id");
    if (const json* faults = r.get("fault_data")) {
      if (!faults->is_array()) {
        fail(ErrorKind::syntax, component.id, r.at("fault_data"), "expected an array");
      }
      for (std::size_t i = 0; i < faults->size(); ++i) {
        ObjectReader fr((*faults)[i], r.at("fault_data") + "[" + std::to_string(i) + "]");
        FaultEntry entry;
        entry.safety_related_fit = fr.number("safety_related_fit");
        entry.non_safety_related_fit = fr.opt_number("non_safety_related_fit").value_or(0.0);
        entry.mechanism_id = fr.opt_string("mechanism_id");
        fr.finish();
        check_fit(entry.safety_related_fit, component.id, fr.at("safety_related_fit"));
        check_fit(entry.non_safety_related_fit, component.id, fr.at("non_safety_related_fit"));
        component.fault_data.push_back(std::move(entry));
      }
      std::sort(component.fault_data.begin(), component.fault_data.end());
    }
    if (const json* seooc = r.get("seooc")) {
      ObjectReader sr(*seooc, r.at("seooc"));
      component.seooc = Seooc{sr.number("subsumed_fit")};
      sr.finish();
      check_fit(component.seooc->subsumed_fit, component.id, sr.at("subsumed_fit"));
    }
    note(component.id, r.path());
    m_.hw_components_.push_back(std::move(component));
  }

  void read_mechanism(ObjectReader& r) {
    SafetyMechanism mechanism;
    mechanism.id = r.id();
    r.rename(entity_path(r, mechanism.id));
    mechanism.dc = r.number("dc");
    mechanism.latent_dc = r.opt_number("latent_dc");
    check_fraction(mechanism.dc, mechanism.id, r.at("dc"));
    if (mechanism.latent_dc) {
      check_fraction(*mechanism.latent_dc, mechanism.id, r.at("latent_dc"));
    }
    note(mechanism.id, r.path());
    m_.mechanisms_.push_back(std::move(mechanism));
  }

  void read_sw_component(ObjectReader& r) {
    SwComponent component;
    component.id = r.id();
    r.rename(entity_path(r, component.id));
    component.ecu_id = r.id("ecu_id");
    component.partition_id = r.opt_string("partition_id");
    component.external = r.opt_boolean("external", false);
    component.developed_to_asil = r.opt_asil("developed_to_asil");
    note(component.id, r.path());
    m_.sw_components_.push_back(std::move(component));
  }

  void read_ecu(ObjectReader& r) {
    Ecu ecu;
    ecu.id = r.id();
    r.rename(entity_path(r, ecu.id));
    if (const json* partitions = r.get("partitions")) {
      if (!partitions->is_array()) {
        fail(ErrorKind::syntax, ecu.id, r.at("partitions"), "expected an array");
      }
      for (std::size_t i = 0; i < partitions->size(); ++i) {
        ObjectReader pr((*partitions)[i], r.at("partitions") + "[" + std::to_string(i) + "]");
        Partition partition;
        partition.id = pr.id();
        partition.memory_protection = pr.boolean("memory_protection");
        partition.timing_watchdog = pr.boolean("timing_watchdog");
        pr.finish();
        note(partition.id, pr.path());
        ecu.partitions.push_back(std::move(partition));
      }
      sort_by_id(ecu.partitions);
    }
    note(ecu.id, r.path());
    m_.ecus_.push_back(std::move(ecu));
  }

  void read_channel(ObjectReader& r) {
    Channel channel;
    channel.id = r.id();
    r.rename(entity_path(r, channel.id));
    channel.from_swc = r.id("from_swc");
    channel.to_swc = r.id("to_swc");
    channel.e2e_protected = r.boolean("e2e_protected");
    note(channel.id, r.path());
    m_.channels_.push_back(std::move(channel));
  }

  void read_tool(ObjectReader& r) {
    Tool tool;
    tool.id = r.id();
    r.rename(entity_path(r, tool.id));
    tool.can_introduce_errors = r.boolean("can_introduce_errors");
    tool.qualified = r.boolean("qualified");
    tool.used_for = r.id_list("used_for");
    note(tool.id, r.path());
    m_.tools_.push_back(std::move(tool));
  }

  void read_evidence(ObjectReader& r) {
    ProvenInUseEvidence record;
    record.element_id = r.id("element_id");
    record.incidents = r.integer("incidents");
    record.service_hours = r.number("service_hours");
    if (record.incidents < 0) {
      fail(ErrorKind::range_violation, record.element_id, r.at("incidents"), "incident count must be >= 0");
    }
    if (!(record.service_hours > 0.0)) {
      fail(ErrorKind::range_violation, record.element_id, r.at("service_hours"), "service hours must be positive");
    }
    evidence_locations_.push_back(r.path());
    m_.evidence_.push_back(std::move(record));
  }

  std::map<AsilLevel, double> read_level_map(const json& node, const std::string& path, bool fractions) {
    if (!node.is_object()) {
      fail(ErrorKind::syntax, "", path, "expected an object keyed by ASIL");
    }
    std::map<AsilLevel, double> out;
    for (const auto& [key, value] : node.items()) {
      AsilLevel level = asil_key(key, path);
      if (!value.is_number()) {
        fail(ErrorKind::syntax, key, path + "." + key, "expected a number");
      }
      double number = value.get<double>();
      if (fractions) {
        check_fraction(number, key, path + "." + key);
      } else {
        check_fit(number, key, path + "." + key);
      }
      out[level] = number;
    }
    return out;
  }

  // Each key present replaces the corresponding default wholesale.
  void read_config(const json& node) {
    ObjectReader r(node, "config");
    Config& config = m_.config_;
    if (const json* schemes = r.get("decomposition_schemes")) {
      if (!schemes->is_object()) {
        fail(ErrorKind::syntax, "", r.at("decomposition_schemes"), "expected an object keyed by ASIL");
      }
      SchemeTable table;
      for (const auto& [key, options] : schemes->items()) {
        AsilLevel parent = asil_key(key, r.at("decomposition_schemes"));
        if (!options.is_array()) {
          fail(ErrorKind::syntax, key, r.at("decomposition_schemes"), "expected an array of ASIL arrays");
        }
        for (const json& option : options) {
          if (!option.is_array()) {
            fail(ErrorKind::syntax, key, r.at("decomposition_schemes"), "expected an array of ASIL arrays");
          }
          std::vector<AsilLevel> children;
          for (const json& level : option) {
            if (!level.is_string()) {
              fail(ErrorKind::syntax, key, r.at("decomposition_schemes"), "expected ASIL strings");
            }
            children.push_back(asil_key(level.get<std::string>(), r.at("decomposition_schemes")));
          }
          table.add(parent, std::move(children));
        }
      }
      config.decomposition_schemes = std::move(table);
    }
    if (const json* targets = r.get("pmhf_targets_fit")) {
      config.pmhf_targets_fit = read_level_map(*targets, r.at("pmhf_targets_fit"), false);
    }
    if (const json* targets = r.get("spfm_targets")) {
      config.spfm_targets = read_level_map(*targets, r.at("spfm_targets"), true);
    }
    if (const json* targets = r.get("lfm_targets")) {
      config.lfm_targets = read_level_map(*targets, r.at("lfm_targets"), true);
    }
    if (auto estimator = r.opt_string("proven_in_use_estimator")) {
      if (*estimator == "point") {
        config.proven_in_use_estimator = PiuEstimator::point;
      } else if (*estimator == "conservative") {
        config.proven_in_use_estimator = PiuEstimator::conservative;
      } else {
        fail(ErrorKind::syntax, *estimator, r.at("proven_in_use_estimator"), "expected point or conservative");
      }
    }
    r.finish();
  }

  // Records the first location of each id; a repeat is a DuplicateId.
  void note(const std::string& id, const std::string& location) {
    auto [it, inserted] = locations_.emplace(id, location);
    if (!inserted) {
      fail(ErrorKind::duplicate_id, id, location, "id already defined at " + it->second);
    }
  }

  void sort_entities() {
    sort_by_id(m_.hazardous_events_);
    sort_by_id(m_.safety_goals_);
    sort_by_id(m_.requirements_);
    sort_by_id(m_.groups_);
    sort_by_id(m_.hw_components_);
    sort_by_id(m_.mechanisms_);
    sort_by_id(m_.sw_components_);
    sort_by_id(m_.ecus_);
    sort_by_id(m_.channels_);
    sort_by_id(m_.tools_);
    // Keep evidence locations aligned with the sorted records.
    std::vector<std::size_t> order(m_.evidence_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto key = [this](std::size_t i) {
      const auto& e = m_.evidence_[i];
      return std::tie(e.element_id, e.incidents, e.service_hours);
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    std::vector<ProvenInUseEvidence> evidence;
    std::vector<std::string> locations;
    for (std::size_t i : order) {
      evidence.push_back(m_.evidence_[i]);
      locations.push_back(evidence_locations_[i]);
    }
    m_.evidence_ = std::move(evidence);
    evidence_locations_ = std::move(locations);
  }

  void build_index() {
    auto& index = m_.index_;
    index.emplace(m_.meta_.item, SafetyModel::EntityRef{EntityKind::item, 0});
    auto add = [&index](const auto& items, EntityKind kind) {
      for (std::size_t i = 0; i < items.size(); ++i) {
        index.emplace(items[i].id, SafetyModel::EntityRef{kind, i});
      }
    };
    add(m_.hazardous_events_, EntityKind::hazardous_event);
    add(m_.safety_goals_, EntityKind::safety_goal);
    add(m_.requirements_, EntityKind::requirement);
    add(m_.groups_, EntityKind::decomposition_group);
    add(m_.hw_components_, EntityKind::hw_component);
    add(m_.mechanisms_, EntityKind::mechanism);
    add(m_.sw_components_, EntityKind::sw_component);
    add(m_.ecus_, EntityKind::ecu);
    add(m_.channels_, EntityKind::channel);
    add(m_.tools_, EntityKind::tool);
    for (std::size_t e = 0; e < m_.ecus_.size(); ++e) {
      for (std::size_t p = 0; p < m_.ecus_[e].partitions.size(); ++p) {
        index.emplace(m_.ecus_[e].partitions[p].id, SafetyModel::EntityRef{EntityKind::partition, e, p});
      }
    }
  }

  void require_exists(const std::string& id, const std::string& location) const {
    if (!m_.index_.contains(id)) {
      fail(ErrorKind::unknown_reference, id, location, "no entity with id '" + id + "'");
    }
  }

  void require_kind(const std::string& id, const std::string& location,
                    std::initializer_list<EntityKind> allowed) const {
    EntityKind actual = *m_.kind_of(id);
    for (EntityKind kind : allowed) {
      if (kind == actual) return;
    }
    std::string expected;
    for (EntityKind kind : allowed) {
      expected += (expected.empty() ? "" : " or ") + std::string(to_string(kind));
    }
    fail(ErrorKind::unknown_reference, id, location,
         "'" + id + "' is a " + std::string(to_string(actual)) + ", expected " + expected);
  }

  void resolve_references() const {
    for (const auto& sg : m_.safety_goals_) {
      for (const auto& he : sg.hazardous_event_ids) require_exists(he, at(sg.id, "hazardous_event_ids"));
    }
    for (const auto& req : m_.requirements_) {
      for (const auto& parent : req.parent_ids) require_exists(parent, at(req.id, "parent_ids"));
      if (req.decomposition_group_id) require_exists(*req.decomposition_group_id, at(req.id, "decomposition_group_id"));
      for (const auto& target : req.allocated_to) require_exists(target, at(req.id, "allocated_to"));
    }
    for (const auto& group : m_.groups_) {
      require_exists(group.parent_id, at(group.id, "parent_requirement_id"));
      for (const auto& member : group.member_ids) require_exists(member, at(group.id, "member_requirement_ids"));
      for (const auto& [member, level] : group.member_target_asils) {
        require_exists(member, at(group.id, "member_target_asils"));
      }
    }
    for (const auto& component : m_.hw_components_) {
      if (component.ecu_id) require_exists(*component.ecu_id, at(component.id, "ecu_id"));
      for (const auto& fault : component.fault_data) {
        if (fault.mechanism_id) require_exists(*fault.mechanism_id, at(component.id, "fault_data"));
      }
    }
    for (const auto& component : m_.sw_components_) {
      require_exists(component.ecu_id, at(component.id, "ecu_id"));
      if (component.partition_id) require_exists(*component.partition_id, at(component.id, "partition_id"));
    }
    for (const auto& channel : m_.channels_) {
      require_exists(channel.from_swc, at(channel.id, "from_swc"));
      require_exists(channel.to_swc, at(channel.id, "to_swc"));
    }
    for (const auto& tool : m_.tools_) {
      for (const auto& target : tool.used_for) require_exists(target, at(tool.id, "used_for"));
    }
    for (std::size_t i = 0; i < m_.evidence_.size(); ++i) {
      require_exists(m_.evidence_[i].element_id, evidence_locations_[i] + ".element_id");
    }
  }

  // Depth-first search over requirement -> requirement parent edges. Runs
  // before kind checks so that a loop is reported as a loop.
  void reject_requirement_cycles() const {
    enum class Mark { none, active, done };
    std::map<std::string, Mark, std::less<>> marks;
    std::vector<std::string> stack;

    std::function<void(const Requirement&)> visit = [&](const Requirement& req) {
      marks[req.id] = Mark::active;
      stack.push_back(req.id);
      for (const auto& parent_id : req.parent_ids) {
        const Requirement* parent = m_.find_requirement(parent_id);
        if (parent == nullptr) continue;
        Mark mark = marks[parent_id];
        if (mark == Mark::active) {
          auto start = std::find(stack.begin(), stack.end(), parent_id);
          std::string smallest = *std::min_element(start, stack.end());
          std::string loop;
          for (auto it = start; it != stack.end(); ++it) loop += *it + " -> ";
          loop += parent_id;
          fail(ErrorKind::cycle_detected, smallest, at(smallest, "parent_ids"), "requirement cycle " + loop);
        }
        if (mark == Mark::none) visit(*parent);
      }
      stack.pop_back();
      marks[req.id] = Mark::done;
    };

    for (const auto& req : m_.requirements_) {
      if (marks[req.id] == Mark::none) visit(req);
    }
  }

  void check_kinds() const {
    for (const auto& sg : m_.safety_goals_) {
      for (const auto& he : sg.hazardous_event_ids) {
        require_kind(he, at(sg.id, "hazardous_event_ids"), {EntityKind::hazardous_event});
      }
    }
    for (const auto& req : m_.requirements_) {
      const EntityKind parent_kind =
          req.kind == RequirementKind::fsr ? EntityKind::safety_goal : EntityKind::requirement;
      for (const auto& parent : req.parent_ids) {
        require_kind(parent, at(req.id, "parent_ids"), {parent_kind});
        if (req.kind == RequirementKind::tsr && m_.find_requirement(parent)->kind != RequirementKind::fsr) {
          fail(ErrorKind::unknown_reference, parent, at(req.id, "parent_ids"),
               "parents of a technical safety requirement must be functional safety requirements");
        }
      }
      if (req.decomposition_group_id) {
        require_kind(*req.decomposition_group_id, at(req.id, "decomposition_group_id"),
                     {EntityKind::decomposition_group});
      }
      for (const auto& target : req.allocated_to) {
        require_kind(target, at(req.id, "allocated_to"), {EntityKind::hw_component, EntityKind::sw_component});
      }
    }
    for (const auto& group : m_.groups_) {
      require_kind(group.parent_id, at(group.id, "parent_requirement_id"),
                   {EntityKind::safety_goal, EntityKind::requirement});
      for (const auto& member : group.member_ids) {
        require_kind(member, at(group.id, "member_requirement_ids"), {EntityKind::requirement});
      }
    }
    for (const auto& component : m_.hw_components_) {
      if (component.ecu_id) require_kind(*component.ecu_id, at(component.id, "ecu_id"), {EntityKind::ecu});
      for (const auto& fault : component.fault_data) {
        if (fault.mechanism_id) {
          require_kind(*fault.mechanism_id, at(component.id, "fault_data"), {EntityKind::mechanism});
        }
      }
    }
    for (const auto& component : m_.sw_components_) {
      require_kind(component.ecu_id, at(component.id, "ecu_id"), {EntityKind::ecu});
      if (component.partition_id) {
        require_kind(*component.partition_id, at(component.id, "partition_id"), {EntityKind::partition});
      }
    }
    for (const auto& channel : m_.channels_) {
      require_kind(channel.from_swc, at(channel.id, "from_swc"), {EntityKind::sw_component});
      require_kind(channel.to_swc, at(channel.id, "to_swc"), {EntityKind::sw_component});
    }
    for (std::size_t i = 0; i < m_.evidence_.size(); ++i) {
      require_kind(m_.evidence_[i].element_id, evidence_locations_[i] + ".element_id",
                   {EntityKind::hw_component, EntityKind::sw_component});
    }
  }

  void check_structure() const {
    for (const auto& component : m_.sw_components_) {
      if (!component.partition_id) continue;
      const auto& ref = m_.index_.find(*component.partition_id)->second;
      if (m_.ecus_[ref.index].id != component.ecu_id) {
        fail(ErrorKind::constraint_violation, *component.partition_id, at(component.id, "partition_id"),
             "partition belongs to ECU '" + m_.ecus_[ref.index].id + "', not '" + component.ecu_id + "'");
      }
    }

    for (const auto& group : m_.groups_) {
      std::set<std::string> targets;
      for (const auto& [member, level] : group.member_target_asils) targets.insert(member);
      std::set<std::string> members(group.member_ids.begin(), group.member_ids.end());
      if (targets != members) {
        fail(ErrorKind::constraint_violation, group.id, at(group.id, "member_target_asils"),
             "target ASILs must be given for exactly the group members");
      }
      std::optional<RequirementKind> kind;
      for (const auto& member_id : group.member_ids) {
        const Requirement& member = *m_.find_requirement(member_id);
        if (member.decomposition_group_id != group.id) {
          fail(ErrorKind::constraint_violation, member_id, at(member_id, "decomposition_group_id"),
               "member of '" + group.id + "' must name it as its decomposition group");
        }
        if (member.parent_ids != std::vector<std::string>{group.parent_id}) {
          fail(ErrorKind::constraint_violation, member_id, at(member_id, "parent_ids"),
               "members of '" + group.id + "' must have exactly the decomposed parent '" + group.parent_id + "'");
        }
        if (kind && *kind != member.kind) {
          fail(ErrorKind::constraint_violation, member_id, at(group.id, "member_requirement_ids"),
               "group members must be of the same requirement kind");
        }
        kind = member.kind;
      }
    }
    for (const auto& req : m_.requirements_) {
      if (!req.decomposition_group_id) continue;
      const auto& group = *m_.find_decomposition_group(*req.decomposition_group_id);
      if (!std::binary_search(group.member_ids.begin(), group.member_ids.end(), req.id)) {
        fail(ErrorKind::constraint_violation, req.id, at(req.id, "decomposition_group_id"),
             "'" + group.id + "' does not list this requirement as a member");
      }
    }
  }

  void build_children() {
    for (const auto& req : m_.requirements_) {
      for (const auto& parent : req.parent_ids) {
        m_.children_[parent].push_back(req.id);  // requirements_ is sorted, so children stay sorted
      }
    }
  }

  std::string at(const std::string& id, std::string_view field) const {
    auto it = locations_.find(id);
    std::string base = it == locations_.end() ? id : it->second;
    return base + "." + std::string(field);
  }

  SafetyModel m_;
  std::map<std::string, std::string, std::less<>> locations_;
  std::vector<std::string> evidence_locations_;
};

std::optional<EntityKind> SafetyModel::kind_of(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second.kind;
}

#define ASILCHECK_FIND(Type, name, entity_kind, member)                   \
  const Type* SafetyModel::name(std::string_view id) const {       \
    auto it = index_.find(id);                                     \
    if (it == index_.end() || it->second.kind != EntityKind::entity_kind) \
      return nullptr;                                              \
    return &member[it->second.index];                              \
  }

ASILCHECK_FIND(HazardousEvent, find_hazardous_event, hazardous_event, hazardous_events_)
ASILCHECK_FIND(SafetyGoal, find_safety_goal, safety_goal, safety_goals_)
ASILCHECK_FIND(Requirement, find_requirement, requirement, requirements_)
ASILCHECK_FIND(DecompositionGroup, find_decomposition_group, decomposition_group, groups_)
ASILCHECK_FIND(HwComponent, find_hw_component, hw_component, hw_components_)
ASILCHECK_FIND(SafetyMechanism, find_mechanism, mechanism, mechanisms_)
ASILCHECK_FIND(SwComponent, find_sw_component, sw_component, sw_components_)

#undef ASILCHECK_FIND

const Partition* SafetyModel::find_partition(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end() || it->second.kind != EntityKind::partition) return nullptr;
  return &ecus_[it->second.index].partitions[it->second.sub];
}

const std::vector<std::string>& SafetyModel::children_of(std::string_view id) const {
  static const std::vector<std::string> kNone;
  auto it = children_.find(id);
  return it == children_.end() ? kNone : it->second;
}

std::vector<std::string> SafetyModel::requirements_under(std::string_view goal_id) const {
  std::set<std::string> seen;
  std::vector<std::string> pending(children_of(goal_id).begin(), children_of(goal_id).end());
  while (!pending.empty()) {
    std::string id = std::move(pending.back());
    pending.pop_back();
    if (!seen.insert(id).second) continue;
    for (const auto& child : children_of(id)) pending.push_back(child);
  }
  return {seen.begin(), seen.end()};
}

std::vector<std::string> SafetyModel::hw_components_for_goal(std::string_view goal_id) const {
  std::set<std::string> out;
  for (const auto& req_id : requirements_under(goal_id)) {
    for (const auto& target : find_requirement(req_id)->allocated_to) {
      if (find_hw_component(target) != nullptr) out.insert(target);
    }
  }
  return {out.begin(), out.end()};
}

SafetyModel parse_model(std::string_view document) { return ModelParser().run(document); }

SafetyModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::syntax, path.string(), "", "cannot open model file");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

std::string serialize_model(const SafetyModel& model) { return to_canonical_json(model).dump(2) + "\n"; }

}  // namespace asilcheck
