#include "asilcheck/cli.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "asilcheck/error.hpp"
#include "asilcheck/fault_sim.hpp"
#include "asilcheck/hw_metrics.hpp"
#include "asilcheck/model.hpp"
#include "asilcheck/propagation.hpp"
#include "asilcheck/report.hpp"

namespace asilcheck::cli {

namespace {

struct Options {
  std::string model_path;
  std::string format = "json";
  std::string out_path;
  bool strict = false;
  std::string goal;
  std::int64_t trials = 100'000;
  double hours = 1e4;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

int write_output(const std::string& text, const std::string& path, std::ostream& out, std::ostream& err) {
  if (path.empty()) {
    out << text;
    return kClean;
  }
  std::ofstream file(path, std::ios::binary);
  file << text;
  if (!file) {
    err << "error: cannot write " << path << "\n";
    return kInternalError;
  }
  return kClean;
}

int do_check(const Options& options, std::ostream& out, std::ostream& err) {
  SafetyModel model = load_model(options.model_path);
  Report report = run_checks(model);
  const auto format = options.format == "text" ? ReportFormat::text : ReportFormat::json;
  if (int status = write_output(render_report(report, format), options.out_path, out, err); status != kClean) {
    return status;
  }
  return exit_code(report, options.strict);
}

int do_validate(const Options& options, std::ostream& out) {
  SafetyModel model = load_model(options.model_path);
  out << "valid: item '" << model.meta().item << "', sha256 " << model.content_hash() << "\n";
  return kClean;
}

int do_simulate(const Options& options, std::ostream& out) {
  SafetyModel model = load_model(options.model_path);
  sim::SimConfig config{options.goal, options.hours, options.trials, options.seed, options.threads};
  sim::SimResult result = sim::simulate_pmhf(model, config);

  nlohmann::json doc = {{"safety_goal_id", options.goal},
                        {"empirical_fit", result.empirical_fit},
                        {"standard_error_fit", result.standard_error},
                        {"violations", result.violations},
                        {"trials", result.trials},
                        {"mission_hours", options.hours},
                        {"seed", options.seed}};
  // The analytic value alongside, for the same fault model.
  propagation::Propagation propagated = propagation::propagate(model, propagation::OnMissingSource::report);
  hw::PmhfResult analytic = hw::pmhf(model, *model.find_safety_goal(options.goal), propagated.effective);
  doc["analytic_fit"] = analytic.analytic_fit;
  if (result.standard_error > 0.0) {
    doc["z_score"] = (result.empirical_fit - analytic.analytic_fit) / result.standard_error;
  }
  out << doc.dump(2) << "\n";
  return kClean;
}

}  // namespace

std::string schema_document() {
  nlohmann::json rules = nlohmann::json::array();
  for (const RuleInfo& rule : rule_catalog()) {
    rules.push_back({{"rule_id", rule.rule_id},
                     {"severity", to_string(rule.severity)},
                     {"anchor", rule.anchor},
                     {"description", rule.description}});
  }
  nlohmann::json doc = {{"model_schema_version", kModelSchemaVersion},
                        {"report_schema_version", kReportSchemaVersion},
                        {"rules", std::move(rules)}};
  return doc.dump(2) + "\n";
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Functional-safety analysis of ISO 26262 item models", "asilcheck"};
  app.require_subcommand(1);
  Options options;

  auto* check = app.add_subcommand("check", "Run every analysis and print the findings report");
  check->add_option("model", options.model_path, "Model file")->required();
  check->add_option("--format", options.format, "Report format")->check(CLI::IsMember({"json", "text"}));
  check->add_option("--out", options.out_path, "Write the report here instead of stdout");
  check->add_flag("--strict", options.strict, "Exit 1 on warnings as well as errors");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo PMHF estimate for one safety goal");
  simulate->add_option("model", options.model_path, "Model file")->required();
  simulate->add_option("--goal", options.goal, "Safety goal id")->required();
  simulate->add_option("--trials", options.trials, "Number of missions")->check(CLI::PositiveNumber);
  simulate->add_option("--hours", options.hours, "Mission length in hours")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", options.seed, "Random seed")->required();
  simulate->add_option("--threads", options.threads, "Worker threads (result is independent of this)")
      ->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "Parse and validate a model file only");
  validate->add_option("model", options.model_path, "Model file")->required();

  auto* schema = app.add_subcommand("schema", "Print schema versions and the rule catalog");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kClean : kInputError;
  }

  try {
    if (check->parsed()) return do_check(options, out, err);
    if (simulate->parsed()) return do_simulate(options, out);
    if (validate->parsed()) return do_validate(options, out);
    if (schema->parsed()) {
      out << schema_document();
      return kClean;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace asilcheck::cli
