#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "asilcheck/asil.hpp"
#include "asilcheck/model.hpp"

namespace asilcheck::testing {

using nlohmann::json;

#ifndef ASILCHECK_SOURCE_DIR
#error "ASILCHECK_SOURCE_DIR must be defined by the build"
#endif

inline std::filesystem::path source_dir() { return ASILCHECK_SOURCE_DIR; }
inline std::filesystem::path corpus_dir() { return source_dir() / "corpus"; }

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline std::vector<std::filesystem::path> corpus_files() {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(corpus_dir())) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

inline SafetyModel parse(const json& doc) { return parse_model(doc.dump()); }

inline json meta(const std::string& item = "item") {
  return {{"schema_version", "1.0"}, {"item", item}};
}

/// 1 HE, 1 SG, 1 FSR, 1 TSR, 1 hardware component.
inline json minimal_model(int e = 4, int s = 3, int c = 3) {
  return {
      {"meta", meta()},
      {"hazardous_events", {{{"id", "HE-1"}, {"exposure", e}, {"severity", s}, {"controllability", c}}}},
      {"safety_goals", {{{"id", "SG-1"}, {"hazardous_event_ids", {"HE-1"}}}}},
      {"requirements",
       {{{"id", "FSR-1"}, {"kind", "FSR"}, {"parent_ids", {"SG-1"}}},
        {{"id", "TSR-1"}, {"kind", "TSR"}, {"parent_ids", {"FSR-1"}}, {"allocated_to", {"HW-1"}}}}},
      {"hw_components", {{{"id", "HW-1"}, {"fault_data", {{{"safety_related_fit", 1.0}}}}}}},
  };
}

/// Reverses or shuffles every entity array of a model document.
inline json permuted(json doc, std::uint32_t seed) {
  std::mt19937 rng(seed);
  for (auto& [key, value] : doc.items()) {
    if (value.is_array()) {
      std::shuffle(value.begin(), value.end(), rng);
      for (auto& entity : value) {
        for (const char* list : {"parent_ids", "allocated_to", "hazardous_event_ids", "fault_data", "partitions"}) {
          if (entity.is_object() && entity.contains(list)) {
            std::shuffle(entity[list].begin(), entity[list].end(), rng);
          }
        }
      }
    }
  }
  return doc;
}

/// The ASIL table checked in as test data, keyed by (E, S, C).
inline std::map<std::tuple<int, int, int>, AsilLevel> load_asil_table() {
  std::map<std::tuple<int, int, int>, AsilLevel> table;
  std::ifstream in(source_dir() / "tests" / "data" / "asil_table.csv");
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string e, s, c, level;
    std::getline(row, e, ',');
    std::getline(row, s, ',');
    std::getline(row, c, ',');
    std::getline(row, level, ',');
    table[{std::stoi(e), std::stoi(s), std::stoi(c)}] = *parse_asil(level);
  }
  return table;
}

/// A random item with a layered HE -> SG -> FSR -> TSR -> component graph
/// and an independent description of the same graph for oracles.
struct RandomItem {
  json doc;
  std::map<std::string, std::tuple<int, int, int>> ratings;   // HE -> (E, S, C)
  std::map<std::string, std::vector<std::string>> parents;    // SG -> HEs, req -> parents
  std::map<std::string, AsilLevel> declared_roots;            // parentless requirements
  std::map<std::string, std::vector<std::string>> allocated;  // component -> allocating requirements
};

inline RandomItem random_item(std::uint32_t seed, int max_nodes = 50) {
  std::mt19937 rng(seed);
  auto uniform = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto pick_subset = [&](const std::vector<std::string>& pool, int lo, int hi) {
    std::vector<std::string> copy = pool;
    std::shuffle(copy.begin(), copy.end(), rng);
    copy.resize(std::min<std::size_t>(copy.size(), static_cast<std::size_t>(uniform(lo, hi))));
    return copy;
  };

  RandomItem item;
  item.doc = {{"meta", meta("random-" + std::to_string(seed))}};
  int budget = uniform(6, max_nodes);
  const int n_he = uniform(1, 4);
  const int n_sg = uniform(1, 5);
  const int n_hw = uniform(1, 4);
  const int n_sw = uniform(1, 4);
  budget -= n_he + n_sg + n_hw + n_sw;
  const int n_req = std::max(2, budget);
  const int n_fsr = std::max(1, n_req / 2);
  const int n_tsr = n_req - n_fsr;

  std::vector<std::string> hes, sgs, fsrs, components;
  for (int i = 0; i < n_he; ++i) {
    std::string id = "HE-" + std::to_string(i);
    int e = uniform(0, 4), s = uniform(0, 3), c = uniform(0, 3);
    item.ratings[id] = {e, s, c};
    item.doc["hazardous_events"].push_back({{"id", id}, {"exposure", e}, {"severity", s}, {"controllability", c}});
    hes.push_back(id);
  }
  for (int i = 0; i < n_sg; ++i) {
    std::string id = "SG-" + std::to_string(i);
    auto targets = pick_subset(hes, 1, 3);
    item.parents[id] = targets;
    item.doc["safety_goals"].push_back({{"id", id}, {"hazardous_event_ids", targets}});
    sgs.push_back(id);
  }
  item.doc["ecus"].push_back({{"id", "ECU-0"}});
  for (int i = 0; i < n_hw; ++i) {
    std::string id = "HW-" + std::to_string(i);
    item.doc["hw_components"].push_back({{"id", id}, {"fault_data", {{{"safety_related_fit", 1.0}}}}});
    components.push_back(id);
  }
  for (int i = 0; i < n_sw; ++i) {
    std::string id = "SW-" + std::to_string(i);
    item.doc["sw_components"].push_back({{"id", id}, {"ecu_id", "ECU-0"}});
    components.push_back(id);
  }

  auto add_requirement = [&](const std::string& id, const char* kind, std::vector<std::string> parent_ids,
                             std::vector<std::string> allocation) {
    json req = {{"id", id}, {"kind", kind}};
    if (!parent_ids.empty()) {
      req["parent_ids"] = parent_ids;
    } else {
      AsilLevel root = kAllAsilLevels[static_cast<std::size_t>(uniform(0, 4))];
      item.declared_roots[id] = root;
      req["declared_asil"] = std::string(to_string(root));
    }
    if (!allocation.empty()) req["allocated_to"] = allocation;
    for (const auto& component : allocation) item.allocated[component].push_back(id);
    item.parents[id] = std::move(parent_ids);
    item.doc["requirements"].push_back(std::move(req));
  };

  for (int i = 0; i < n_fsr; ++i) {
    std::string id = "FSR-" + std::to_string(i);
    add_requirement(id, "FSR", uniform(0, 9) == 0 ? std::vector<std::string>{} : pick_subset(sgs, 1, 3), {});
    fsrs.push_back(id);
  }
  for (int i = 0; i < n_tsr; ++i) {
    std::string id = "TSR-" + std::to_string(i);
    add_requirement(id, "TSR", uniform(0, 9) == 0 ? std::vector<std::string>{} : pick_subset(fsrs, 1, 3),
                    pick_subset(components, 1, 3));
  }
  return item;
}

}  // namespace asilcheck::testing
