#include "asilcheck/fault_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>
#include <vector>

#include "asilcheck/error.hpp"

namespace asilcheck::sim {

namespace {

// One Poisson fault source. `detect` is the probability an arrival is caught.
struct Source {
  double mean_arrivals = 0.0;  // over one mission
  double detect = 0.0;
};

struct Tally {
  std::int64_t violations = 0;
  std::int64_t squares = 0;  // sum of per-trial violation counts squared

  void add(const Tally& other) {
    violations += other.violations;
    squares += other.squares;
  }
};

std::vector<Source> collect_sources(const SafetyModel& model, const SafetyGoal& goal, double mission_hours) {
  std::vector<Source> sources;
  auto push = [&](double fit, double detect) {
    if (fit > 0.0 && detect < 1.0) {
      sources.push_back(Source{fit * 1e-9 * mission_hours, detect});
    }
  };
  for (const auto& component_id : model.hw_components_for_goal(goal.id)) {
    const HwComponent& component = *model.find_hw_component(component_id);
    if (!component.has_fault_model()) {
      throw Error(ErrorKind::missing_fault_data, component.id, "hw_components[" + component.id + "]",
                  "cannot simulate goal '" + goal.id + "': component has neither fault_data nor seooc");
    }
    if (component.seooc) {
      push(component.seooc->subsumed_fit, 0.0);
      continue;
    }
    for (const auto& entry : component.fault_data) {
      double dc = entry.mechanism_id ? model.find_mechanism(*entry.mechanism_id)->dc : 0.0;
      push(entry.safety_related_fit, dc);
    }
  }
  return sources;
}

Tally run_trials(const std::vector<Source>& sources, std::uint64_t seed, std::int64_t begin, std::int64_t end) {
  std::vector<std::poisson_distribution<std::int64_t>> arrivals;
  for (const Source& source : sources) arrivals.emplace_back(source.mean_arrivals);

  Tally tally;
  for (std::int64_t trial = begin; trial < end; ++trial) {
    std::mt19937_64 engine(trial_seed(seed, static_cast<std::uint64_t>(trial)));
    std::int64_t count = 0;
    for (std::size_t s = 0; s < sources.size(); ++s) {
      auto draw = arrivals[s];  // fresh copy: no state carried between trials
      const std::int64_t n = draw(engine);
      if (sources[s].detect <= 0.0) {
        count += n;
        continue;
      }
      std::bernoulli_distribution escapes(1.0 - sources[s].detect);
      for (std::int64_t k = 0; k < n; ++k) {
        if (escapes(engine)) ++count;
      }
    }
    tally.violations += count;
    tally.squares += count * count;
  }
  return tally;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) noexcept {
  // splitmix64 finalizer over (seed, trial)
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SimResult simulate_pmhf(const SafetyModel& model, const SimConfig& config) {
  const SafetyGoal* goal = model.find_safety_goal(config.safety_goal_id);
  if (goal == nullptr) {
    throw Error(ErrorKind::unknown_reference, config.safety_goal_id, "--goal", "no safety goal with this id");
  }
  if (config.trials < 1) {
    throw Error(ErrorKind::range_violation, std::to_string(config.trials), "trials", "need at least one trial");
  }
  if (!(config.mission_hours > 0.0)) {
    throw Error(ErrorKind::non_positive_hours, std::to_string(config.mission_hours), "mission_hours",
                "mission hours must be positive");
  }

  const std::vector<Source> sources = collect_sources(model, *goal, config.mission_hours);

  const unsigned workers = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(config.trials)));
  std::vector<Tally> partial(workers);
  if (workers == 1) {
    partial[0] = run_trials(sources, config.seed, 0, config.trials);
  } else {
    std::vector<std::jthread> pool;
    const std::int64_t chunk = (config.trials + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::int64_t begin = std::min<std::int64_t>(config.trials, w * chunk);
      const std::int64_t end = std::min<std::int64_t>(config.trials, begin + chunk);
      pool.emplace_back([&, w, begin, end] { partial[w] = run_trials(sources, config.seed, begin, end); });
    }
  }
  Tally total;
  for (const Tally& t : partial) total.add(t);

  const double n = static_cast<double>(config.trials);
  const double mean = static_cast<double>(total.violations) / n;
  const double variance = std::max(0.0, static_cast<double>(total.squares) / n - mean * mean);
  const double to_fit = 1e9 / config.mission_hours;

  SimResult result;
  result.trials = config.trials;
  result.violations = total.violations;
  result.empirical_fit = static_cast<double>(total.violations) / (n * config.mission_hours) * 1e9;
  result.standard_error = std::sqrt(variance / n) * to_fit;
  return result;
}

}  // namespace asilcheck::sim
