#include <doctest.h>

#include <sstream>

#include "asilcheck/cli.hpp"
#include "asilcheck/report.hpp"
#include "test_support.hpp"

using namespace asilcheck;
namespace t = asilcheck::testing;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  auto path = std::filesystem::temp_directory_path() / ("asilcheck-test-" + name);
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

}  // namespace

TEST_CASE("check exit codes over the corpus") {
  for (const auto& path : t::corpus_files()) {
    CAPTURE(path.filename().string());
    Report report = run_checks(load_model(path));
    const int expected = report.summary.errors > 0 ? 1 : 0;
    Run json_run = run_cli({"check", path.string()});
    CHECK(json_run.code == expected);
    CHECK(json_run.out == render_report(report, ReportFormat::json));
    Run text_run = run_cli({"check", path.string(), "--format", "text"});
    CHECK(text_run.code == expected);
    CHECK(text_run.out == render_report(report, ReportFormat::text));
    Run strict = run_cli({"check", "--strict", path.string()});
    CHECK(strict.code == (report.summary.errors + report.summary.warnings > 0 ? 1 : 0));
  }
}

TEST_CASE("both exit codes 0 and 1 occur in the corpus") {
  std::set<int> codes;
  for (const auto& path : t::corpus_files()) codes.insert(run_cli({"check", path.string()}).code);
  CHECK(codes == std::set<int>{0, 1});
}

TEST_CASE("parse failures exit 2") {
  auto bad_json = write_temp("bad.json", "{\"meta\": {");
  auto bad_range = write_temp("range.json", R"({"meta": {"schema_version": "1.0", "item": "x"},
    "hazardous_events": [{"id": "HE", "exposure": 5, "severity": 1, "controllability": 1}]})");
  for (const auto& path : {bad_json, bad_range, std::filesystem::path("/nonexistent/model.json")}) {
    CAPTURE(path.string());
    Run r = run_cli({"check", path.string()});
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    CHECK_FALSE(r.err.empty());
    CHECK(run_cli({"validate", path.string()}).code == 2);
  }
  Run r = run_cli({"check", bad_range.string()});
  CHECK(r.err.find("RangeViolation") != std::string::npos);
  CHECK(r.err.find("HE") != std::string::npos);
}

TEST_CASE("usage errors exit 2, help exits 0") {
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"check"}).code == 2);
  CHECK(run_cli({"check", "x.json", "--format", "xml"}).code == 2);
  CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("internal faults exit 3") {
  // An unwritable output path is not a model problem.
  auto model = (t::corpus_dir() / "empty.json").string();
  Run r = run_cli({"check", model, "--out", "/nonexistent-dir/report.json"});
  CHECK(r.code == 3);
}

TEST_CASE("--out writes the report to a file") {
  auto model = t::corpus_dir() / "lane_keeping.json";
  auto target = std::filesystem::temp_directory_path() / "asilcheck-test-out.json";
  Run r = run_cli({"check", model.string(), "--out", target.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(t::read_file(target) == render_report(run_checks(load_model(model)), ReportFormat::json));
}

TEST_CASE("validate") {
  Run r = run_cli({"validate", (t::corpus_dir() / "lane_keeping.json").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("lka-item") != std::string::npos);
  CHECK(r.out.find(load_model(t::corpus_dir() / "lane_keeping.json").content_hash()) != std::string::npos);
}

TEST_CASE("schema lists the whole rule catalog and matches the shipped document") {
  Run r = run_cli({"schema"});
  CHECK(r.code == 0);
  json doc = json::parse(r.out);
  CHECK(doc["model_schema_version"] == kModelSchemaVersion);
  CHECK(doc["report_schema_version"] == kReportSchemaVersion);
  CHECK(doc["rules"].size() == rule_catalog().size());
  for (const auto& rule : doc["rules"]) CHECK_FALSE(rule["anchor"].get<std::string>().empty());
  CHECK(r.out == t::read_file(t::source_dir() / "docs" / "rule_catalog.json"));
}

TEST_CASE("simulate") {
  auto model = (t::corpus_dir() / "seooc_budget.json").string();
  Run a = run_cli({"simulate", model, "--goal", "SG-1", "--seed", "7", "--trials", "20000"});
  Run b = run_cli({"simulate", model, "--goal", "SG-1", "--seed", "7", "--trials", "20000", "--threads", "3"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  json doc = json::parse(a.out);
  CHECK(doc["trials"] == 20000);
  CHECK(doc["analytic_fit"].get<double>() == doctest::Approx(9.0));
  CHECK(run_cli({"simulate", model, "--goal", "SG-1"}).code == 2);
  CHECK(run_cli({"simulate", model, "--goal", "NOPE", "--seed", "1"}).code == 2);
}
