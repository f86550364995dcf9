#include <doctest.h>

#include <array>
#include <random>

#include "asilcheck/error.hpp"
#include "asilcheck/hw_metrics.hpp"
#include "asilcheck/propagation.hpp"
#include "test_support.hpp"

using namespace asilcheck;
using namespace asilcheck::hw;
namespace t = asilcheck::testing;
using nlohmann::json;

namespace {

// One goal at `level` whose single TSR allocates every given component.
json goal_model(AsilLevel level, const std::vector<json>& components, const std::vector<json>& mechanisms = {}) {
  static const std::map<AsilLevel, std::array<int, 3>> ratings = {
      {AsilLevel::QM, {2, 2, 2}}, {AsilLevel::A, {3, 2, 2}}, {AsilLevel::B, {4, 3, 1}},
      {AsilLevel::C, {4, 3, 2}},  {AsilLevel::D, {4, 3, 3}}};
  const auto& [e, s, c] = ratings.at(level);
  json ids = json::array();
  for (const auto& component : components) ids.push_back(component["id"]);
  json doc = {{"meta", t::meta()},
              {"hazardous_events", {{{"id", "HE-1"}, {"exposure", e}, {"severity", s}, {"controllability", c}}}},
              {"safety_goals", {{{"id", "SG-1"}, {"hazardous_event_ids", {"HE-1"}}}}},
              {"requirements",
               {{{"id", "FSR-1"}, {"kind", "FSR"}, {"parent_ids", {"SG-1"}}},
                {{"id", "TSR-1"}, {"kind", "TSR"}, {"parent_ids", {"FSR-1"}}, {"allocated_to", ids}}}},
              {"hw_components", json(components)}};
  if (!mechanisms.empty()) doc["mechanisms"] = json(mechanisms);
  return doc;
}

json component(const std::string& id, double fit, const char* mechanism = nullptr) {
  json entry = {{"safety_related_fit", fit}};
  if (mechanism != nullptr) entry["mechanism_id"] = mechanism;
  return {{"id", id}, {"fault_data", {entry}}};
}

json mech(const std::string& id, double dc, std::optional<double> latent = std::nullopt) {
  json m = {{"id", id}, {"dc", dc}};
  if (latent) m["latent_dc"] = *latent;
  return m;
}

struct Evaluated {
  PmhfResult pmhf;
  ArchMetrics arch;
  HwBudgets budgets;
};

Evaluated evaluate(const json& doc) {
  SafetyModel model = t::parse(doc);
  auto propagated = propagation::propagate(model).effective;
  const SafetyGoal& goal = *model.find_safety_goal("SG-1");
  return {pmhf(model, goal, propagated), arch_metrics(model, goal, propagated), check_hw_budgets(model, propagated)};
}

std::vector<std::string> rule_ids(const std::vector<Finding>& findings) {
  std::vector<std::string> out;
  for (const auto& f : findings) out.push_back(f.rule_id);
  return out;
}

}  // namespace

TEST_CASE("fit_from_observation") {
  CHECK(fit_from_observation(5, 1e7) == doctest::Approx(500.0));
  CHECK(fit_from_observation(0, 1e9) == 0.0);
  CHECK(fit_from_observation(1, 1e9) == doctest::Approx(1.0));
  for (double hours : {0.0, -5.0}) {
    try {
      fit_from_observation(1, hours);
      FAIL("expected NonPositiveHours");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::non_positive_hours);
    }
  }
}

TEST_CASE("pmhf examples") {
  SUBCASE("SEooC plus residuals under the ASIL D target") {
    Evaluated r = evaluate(goal_model(AsilLevel::D,
                                      {{{"id", "HW-SEOOC"}, {"seooc", {{"subsumed_fit", 3}}}},
                                       component("HW-A", 4), component("HW-B", 40, "M-B")},
                                      {mech("M-B", 0.95)}));
    CHECK(r.pmhf.analytic_fit == doctest::Approx(9.0));
    CHECK(r.pmhf.contributions.at("HW-SEOOC") == 3.0);
    CHECK(r.pmhf.target == 10.0);
    CHECK(r.pmhf.pass);
  }
  SUBCASE("100 fit at dc 0.95 contributes 5 fit") {
    Evaluated r = evaluate(goal_model(AsilLevel::D, {component("HW-1", 100, "M")}, {mech("M", 0.95)}));
    CHECK(r.pmhf.contributions.at("HW-1") == doctest::Approx(5.0));
  }
  SUBCASE("ASIL C at 150 fit fails") {
    Evaluated r = evaluate(goal_model(AsilLevel::C, {component("HW-1", 150)}));
    CHECK(r.pmhf.target == 100.0);
    CHECK_FALSE(r.pmhf.pass);
    CHECK(rule_ids(r.budgets.findings) ==
          std::vector<std::string>{"pmhf-exceeded", "spfm-below-target"});
  }
}

TEST_CASE("missing fault data") {
  json doc = goal_model(AsilLevel::D, {component("HW-1", 1), {{"id", "HW-BLANK"}}});
  SafetyModel model = t::parse(doc);
  auto propagated = propagation::propagate(model).effective;
  try {
    pmhf(model, *model.find_safety_goal("SG-1"), propagated);
    FAIL("expected MissingFaultData");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::missing_fault_data);
    CHECK(e.subject() == "HW-BLANK");
  }
  HwBudgets budgets = check_hw_budgets(model, propagated);
  CHECK(rule_ids(budgets.findings) == std::vector<std::string>{"missing-fault-data"});
  CHECK(budgets.pmhf.empty());

  // Below ASIL B there is no budget to miss.
  Evaluated a = evaluate(goal_model(AsilLevel::A, {component("HW-1", 1), {{"id", "HW-BLANK"}}}));
  CHECK(a.pmhf.analytic_fit == doctest::Approx(1.0));
}

TEST_CASE("arch metric examples") {
  SUBCASE("all uncovered") {
    Evaluated r = evaluate(goal_model(AsilLevel::D, {component("HW-1", 10), component("HW-2", 20)}));
    CHECK(r.arch.spfm == 0.0);
  }
  SUBCASE("perfect coverage") {
    Evaluated r = evaluate(goal_model(AsilLevel::D, {component("HW-1", 10, "M")}, {mech("M", 1.0, 1.0)}));
    CHECK(r.arch.spfm == 1.0);
    CHECK(r.arch.lfm == 1.0);
    CHECK(r.pmhf.analytic_fit == 0.0);
  }
  SUBCASE("two entries of 50 fit") {
    json two_entries = {{"id", "HW-1"},
                      {"fault_data", {{{"safety_related_fit", 50}}, {{"safety_related_fit", 50}, {"mechanism_id", "M"}}}}};
    Evaluated r = evaluate(goal_model(AsilLevel::D, {two_entries}, {mech("M", 0.9, 0.0)}));
    CHECK(r.arch.spfm == doctest::Approx(0.45));
    CHECK(r.arch.lfm == doctest::Approx(0.0));
    CHECK(r.pmhf.analytic_fit == doctest::Approx(55.0));
  }
  SUBCASE("latent dc defaults to zero") {
    Evaluated r = evaluate(goal_model(AsilLevel::D, {component("HW-1", 100, "M")}, {mech("M", 0.9)}));
    CHECK(r.arch.lfm == doctest::Approx(0.0));
  }
  SUBCASE("zero denominator reports 1 with a note") {
    Evaluated r = evaluate(goal_model(AsilLevel::D, {{{"id", "HW-S"}, {"seooc", {{"subsumed_fit", 1}}}}}));
    CHECK(r.arch.spfm == 1.0);
    CHECK(r.arch.lfm == 1.0);
    CHECK_FALSE(r.arch.notes.empty());
  }
}

TEST_CASE("budget boundaries") {
  SUBCASE("D at 11 fit") {
    Evaluated r = evaluate(goal_model(AsilLevel::D, {component("HW-1", 2200, "M")}, {mech("M", 0.995, 1.0)}));
    CHECK(r.pmhf.analytic_fit == doctest::Approx(11.0));
    CHECK_FALSE(r.pmhf.pass);
    CHECK(rule_ids(r.budgets.findings) == std::vector<std::string>{"pmhf-exceeded"});
  }
  SUBCASE("B at exactly 100 fit passes") {
    Evaluated r = evaluate(goal_model(AsilLevel::B, {component("HW-1", 100)}));
    CHECK(r.pmhf.analytic_fit == 100.0);
    CHECK(r.pmhf.pass);
    for (const auto& f : r.budgets.findings) CHECK(f.rule_id != "pmhf-exceeded");
  }
  SUBCASE("A has no default target") {
    Evaluated r = evaluate(goal_model(AsilLevel::A, {component("HW-1", 5000)}));
    CHECK_FALSE(r.pmhf.target.has_value());
    CHECK(r.pmhf.pass);
    CHECK(r.budgets.findings.empty());
  }
  SUBCASE("configured A target") {
    json doc = goal_model(AsilLevel::A, {component("HW-1", 5000)});
    doc["config"] = {{"pmhf_targets_fit", {{"A", 1000}}}};
    Evaluated r = evaluate(doc);
    CHECK(r.pmhf.target == 1000.0);
    CHECK_FALSE(r.pmhf.pass);
  }
}

TEST_CASE("splitting a fault entry leaves the metrics unchanged") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> rate(0.0, 200.0), unit(0.0, 1.0);
  for (int round = 0; round < 200; ++round) {
    std::vector<json> components, mechanisms, split;
    for (int i = 0; i < 4; ++i) {
      const std::string m = "M-" + std::to_string(i);
      mechanisms.push_back(mech(m, unit(rng), unit(rng)));
      json entry = {{"safety_related_fit", rate(rng)}, {"non_safety_related_fit", rate(rng)}};
      if (rng() % 3 != 0) entry["mechanism_id"] = m;
      json half = entry;
      half["safety_related_fit"] = entry["safety_related_fit"].get<double>() / 2;
      const std::string id = "HW-" + std::to_string(i);
      components.push_back({{"id", id}, {"fault_data", {entry}}});
      split.push_back({{"id", id}, {"fault_data", {half, half}}});
    }
    Evaluated whole = evaluate(goal_model(AsilLevel::D, components, mechanisms));
    Evaluated halves = evaluate(goal_model(AsilLevel::D, split, mechanisms));
    CHECK(halves.pmhf.analytic_fit == doctest::Approx(whole.pmhf.analytic_fit).epsilon(1e-9));
    CHECK(halves.arch.spfm == doctest::Approx(whole.arch.spfm).epsilon(1e-9));
    CHECK(halves.arch.lfm == doctest::Approx(whole.arch.lfm).epsilon(1e-9));
    CHECK(whole.arch.spfm >= 0.0);
    CHECK(whole.arch.spfm <= 1.0);
    CHECK(whole.arch.lfm >= 0.0);
    CHECK(whole.arch.lfm <= 1.0);
    double sum = 0.0;
    for (const auto& [id, fit] : whole.pmhf.contributions) sum += fit;
    CHECK(whole.pmhf.analytic_fit == doctest::Approx(sum).epsilon(1e-9));
  }
}

TEST_CASE("pmhf is monotone in rates and coverage") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> rate(0.0, 100.0), unit(0.0, 1.0);
  for (int round = 0; round < 200; ++round) {
    const double lambda = rate(rng), dc = unit(rng), bump = rate(rng), dc_bump = unit(rng) * (1.0 - dc);
    auto fit = [](double l, double d) {
      return evaluate(goal_model(AsilLevel::D, {component("HW-1", l, "M"), component("HW-2", 7)}, {mech("M", d)})).pmhf.analytic_fit;
    };
    const double base = fit(lambda, dc);
    CHECK(fit(lambda + bump, dc) >= base);
    CHECK(fit(lambda, dc + dc_bump) <= base);
  }
}
