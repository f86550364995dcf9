#include "asilcheck/propagation.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "asilcheck/error.hpp"
#include "asilcheck/hara.hpp"

namespace asilcheck::propagation {

namespace {

std::string levels_text(const std::vector<AsilLevel>& levels) {
  std::string out = "{";
  for (std::size_t i = 0; i < levels.size(); ++i) {
    out += (i ? ", " : "") + std::string(to_string(levels[i]));
  }
  return out + "}";
}

bool blank(const std::string& text) {
  return std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); });
}

// The highest level seen along any contributing chain, kept only when a
// decomposition put it above the effective level.
std::optional<AsilLevel> inherited_origin(AsilLevel effective, const std::vector<const EffectiveAsil*>& parents) {
  AsilLevel highest = effective;
  for (const EffectiveAsil* parent : parents) {
    highest = std::max(highest, parent->origin.value_or(parent->effective));
  }
  return highest > effective ? std::optional<AsilLevel>(highest) : std::nullopt;
}

class Propagator {
 public:
  Propagator(const SafetyModel& model, OnMissingSource on_missing) : model_(model), on_missing_(on_missing) {}

  Propagation run() {
    for (const auto& sg : model_.safety_goals()) goal(sg);
    for (const auto& req : model_.requirements()) requirement(req);
    for (const auto& component : model_.hw_components()) component_asil(component.id);
    for (const auto& component : model_.sw_components()) component_asil(component.id);
    for (auto& [id, verdict] : verdicts_) {
      out_.findings.insert(out_.findings.end(), verdict.findings.begin(), verdict.findings.end());
      out_.decompositions.push_back(std::move(verdict));
    }
    return std::move(out_);
  }

 private:
  const EffectiveAsil& goal(const SafetyGoal& sg) {
    if (auto it = out_.effective.find(sg.id); it != out_.effective.end()) return it->second;
    EffectiveAsil result{sg.id, AsilLevel::QM, std::nullopt, sg.hazardous_event_ids};
    for (const auto& he_id : sg.hazardous_event_ids) {
      const HazardousEvent& he = *model_.find_hazardous_event(he_id);
      result.effective = std::max(result.effective, hara::classify_asil(he.exposure, he.severity, he.controllability));
    }
    check_declared(sg.id, sg.declared_asil, result.effective);
    return out_.effective.emplace(sg.id, std::move(result)).first->second;
  }

  const EffectiveAsil& node(const std::string& id) {
    if (const SafetyGoal* sg = model_.find_safety_goal(id)) return goal(*sg);
    return requirement(*model_.find_requirement(id));
  }

  // The model guarantees an acyclic requirement graph, so plain memoized
  // recursion terminates.
  const EffectiveAsil& requirement(const Requirement& req) {
    if (auto it = out_.effective.find(req.id); it != out_.effective.end()) return it->second;

    EffectiveAsil result{req.id, AsilLevel::QM, std::nullopt, req.parent_ids};
    if (req.decomposition_group_id) {
      const DecompositionGroup& group = *model_.find_decomposition_group(*req.decomposition_group_id);
      const EffectiveAsil& parent = node(group.parent_id);
      const DecompositionVerdict& verdict = decomposition(group, parent.effective);
      if (verdict.valid) {
        result.effective = group.member_target_asils.at(req.id);
        result.origin = parent.origin.value_or(parent.effective);
        if (*result.origin <= result.effective) result.origin.reset();
      } else {
        result.effective = parent.effective;
        result.origin = parent.origin;
      }
    } else if (!req.parent_ids.empty()) {
      std::vector<const EffectiveAsil*> parents;
      for (const auto& parent_id : req.parent_ids) {
        parents.push_back(&node(parent_id));
        result.effective = std::max(result.effective, parents.back()->effective);
      }
      result.origin = inherited_origin(result.effective, parents);
    } else if (req.declared_asil) {
      result.effective = *req.declared_asil;
    } else if (on_missing_ == OnMissingSource::fail) {
      throw Error(ErrorKind::missing_asil_source, req.id, "requirements[" + req.id + "]",
                  "requirement has no parents and no declared_asil");
    } else {
      out_.findings.push_back(make_finding("missing-asil-source", req.id,
                                           "requirement has no parents and no declared ASIL; treated as QM"));
    }
    if (!req.parent_ids.empty()) {
      check_declared(req.id, req.declared_asil, result.effective);
    }
    return out_.effective.emplace(req.id, std::move(result)).first->second;
  }

  const DecompositionVerdict& decomposition(const DecompositionGroup& group, AsilLevel parent_effective) {
    auto it = verdicts_.find(group.id);
    if (it == verdicts_.end()) {
      it = verdicts_
               .emplace(group.id,
                        validate_decomposition(group, model_.config().decomposition_schemes, parent_effective))
               .first;
    }
    return it->second;
  }

  void component_asil(const std::string& component_id) {
    EffectiveAsil result{component_id, AsilLevel::QM, std::nullopt, {}};
    std::vector<const EffectiveAsil*> allocating;
    for (const auto& req : model_.requirements()) {
      if (std::binary_search(req.allocated_to.begin(), req.allocated_to.end(), component_id)) {
        allocating.push_back(&out_.effective.at(req.id));
        result.effective = std::max(result.effective, allocating.back()->effective);
        result.provenance.push_back(req.id);
      }
    }
    result.origin = inherited_origin(result.effective, allocating);
    out_.effective.emplace(component_id, std::move(result));
  }

  void check_declared(const std::string& id, std::optional<AsilLevel> declared, AsilLevel computed) {
    if (declared && *declared != computed) {
      out_.findings.push_back(make_finding("declared-asil-mismatch", id,
                                           "declared ASIL " + std::string(to_string(*declared)) +
                                               " but inheritance gives " + std::string(to_string(computed))));
    }
  }

  const SafetyModel& model_;
  OnMissingSource on_missing_;
  Propagation out_;
  std::map<std::string, DecompositionVerdict, std::less<>> verdicts_;
};

// Union-find over the software components of one ECU.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

DecompositionVerdict validate_decomposition(const DecompositionGroup& group, const SchemeTable& table,
                                            AsilLevel parent_effective) {
  DecompositionVerdict verdict{group.id, false, parent_effective, {}};

  std::vector<AsilLevel> targets;
  for (const auto& [member, level] : group.member_target_asils) targets.push_back(level);
  targets = make_multiset(std::move(targets));

  std::vector<std::string> problems;
  if (blank(group.independence_evidence)) {
    problems.push_back("no independence evidence");
  }
  if (!table.allows(parent_effective, targets)) {
    problems.push_back("scheme " + std::string(to_string(parent_effective)) + " -> " + levels_text(targets) +
                       " is not in the decomposition table");
  }

  if (problems.empty()) {
    verdict.valid = true;
    verdict.findings.push_back(make_finding("decomposition-applied", group.id,
                                            "ASIL " + std::string(to_string(parent_effective)) +
                                                " decomposed into " + levels_text(targets)));
  } else {
    std::string message;
    for (const auto& problem : problems) message += (message.empty() ? "" : "; ") + problem;
    verdict.findings.push_back(make_finding(
        "invalid-decomposition", group.id,
        message + "; members keep ASIL " + std::string(to_string(parent_effective))));
  }
  return verdict;
}

Propagation propagate(const SafetyModel& model, OnMissingSource on_missing) {
  return Propagator(model, on_missing).run();
}

FfiResult ffi_analysis(const SafetyModel& model, const AsilMap& propagated) {
  FfiResult out;
  for (const auto& swc : model.sw_components()) {
    auto it = propagated.find(swc.id);
    out.sw_effective.emplace(swc.id, it != propagated.end() ? it->second : EffectiveAsil{swc.id, AsilLevel::QM, std::nullopt, {}});
  }

  auto isolating = [&model](const SwComponent& swc) -> const Partition* {
    if (!swc.partition_id) return nullptr;
    const Partition* partition = model.find_partition(*swc.partition_id);
    return partition->isolates() ? partition : nullptr;
  };

  for (const auto& ecu : model.ecus()) {
    std::vector<const SwComponent*> hosted;
    for (const auto& swc : model.sw_components()) {
      if (swc.ecu_id == ecu.id) hosted.push_back(&swc);
    }

    DisjointSets sets(hosted.size());
    for (std::size_t i = 0; i < hosted.size(); ++i) {
      for (std::size_t j = i + 1; j < hosted.size(); ++j) {
        const Partition* a = isolating(*hosted[i]);
        const Partition* b = isolating(*hosted[j]);
        bool separated = a != nullptr && b != nullptr && a != b;
        if (!separated) sets.unite(i, j);
      }
    }

    // Pre-lift levels; lifting is decided for the whole ECU before any write.
    std::vector<AsilLevel> before;
    std::map<std::size_t, AsilLevel> set_max;
    for (std::size_t i = 0; i < hosted.size(); ++i) {
      before.push_back(out.sw_effective.at(hosted[i]->id).effective);
      AsilLevel& level = set_max[sets.find(i)];
      level = std::max(level, before.back());
    }

    for (std::size_t i = 0; i < hosted.size(); ++i) {
      const AsilLevel target = set_max.at(sets.find(i));
      if (before[i] >= target) continue;
      EffectiveAsil& lifted = out.sw_effective.at(hosted[i]->id);
      std::vector<std::string> sources;
      for (std::size_t j = 0; j < hosted.size(); ++j) {
        if (sets.find(j) == sets.find(i) && before[j] == target) sources.push_back(hosted[j]->id);
      }
      std::string message = "lifted from " + std::string(to_string(lifted.effective)) + " to " +
                             std::string(to_string(target)) + " on ECU '" + ecu.id +
                             "' without freedom from interference with";
      for (const auto& source : sources) message += " '" + source + "'";
      out.findings.push_back(make_finding("asil-lift-up", lifted.element_id, std::move(message)));

      lifted.effective = target;
      if (lifted.origin && *lifted.origin <= target) lifted.origin.reset();
      lifted.provenance.insert(lifted.provenance.end(), sources.begin(), sources.end());
      std::sort(lifted.provenance.begin(), lifted.provenance.end());
      lifted.provenance.erase(std::unique(lifted.provenance.begin(), lifted.provenance.end()),
                              lifted.provenance.end());
    }
  }

  for (const auto& channel : model.channels()) {
    const SwComponent& from = *model.find_sw_component(channel.from_swc);
    const SwComponent& to = *model.find_sw_component(channel.to_swc);
    if (from.ecu_id == to.ecu_id || channel.e2e_protected) continue;
    AsilLevel level = std::max(out.sw_effective.at(from.id).effective, out.sw_effective.at(to.id).effective);
    if (level >= AsilLevel::A) {
      out.findings.push_back(make_finding("unprotected-channel", channel.id,
                                          "ASIL " + std::string(to_string(level)) + " channel from '" + from.id +
                                              "' (" + from.ecu_id + ") to '" + to.id + "' (" + to.ecu_id +
                                              ") lacks end-to-end protection"));
    }
  }
  return out;
}

}  // namespace asilcheck::propagation
