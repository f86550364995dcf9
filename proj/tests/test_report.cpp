#include <doctest.h>

#include "asilcheck/report.hpp"
#include "test_support.hpp"

using namespace asilcheck;
namespace t = asilcheck::testing;
using nlohmann::json;

namespace {

std::filesystem::path golden_for(const std::filesystem::path& model) {
  return t::corpus_dir() / "golden" / (model.stem().string() + ".report.json");
}

std::string render_json(const json& doc) { return render_report(run_checks(t::parse(doc)), ReportFormat::json); }

std::vector<std::string> rule_ids(const Report& report) {
  std::vector<std::string> out;
  for (const auto& f : report.findings) out.push_back(f.rule_id);
  return out;
}

}  // namespace

TEST_CASE("corpus reports match the checked-in golden files") {
  for (const auto& path : t::corpus_files()) {
    CAPTURE(path.filename().string());
    REQUIRE(std::filesystem::exists(golden_for(path)));
    CHECK(render_report(run_checks(load_model(path)), ReportFormat::json) == t::read_file(golden_for(path)));
  }
}

TEST_CASE("reports do not depend on input order") {
  for (const auto& path : t::corpus_files()) {
    CAPTURE(path.filename().string());
    const json doc = json::parse(t::read_file(path));
    const std::string expected = render_json(doc);
    for (std::uint32_t seed = 1; seed <= 5; ++seed) CHECK(render_json(t::permuted(doc, seed)) == expected);
  }
}

TEST_CASE("lane keeping model is clean") {
  Report report = run_checks(load_model(t::corpus_dir() / "lane_keeping.json"));
  CHECK(report.summary.errors == 0);
  CHECK(exit_code(report) == 0);
}

TEST_CASE("raising the SEooC budget adds exactly one pmhf-exceeded") {
  json doc = json::parse(t::read_file(t::corpus_dir() / "lane_keeping.json"));
  Report before = run_checks(t::parse(doc));
  for (auto& component : doc["hw_components"]) {
    if (component.contains("seooc")) component["seooc"]["subsumed_fit"] = 20;
  }
  Report after = run_checks(t::parse(doc));
  std::vector<Finding> added;
  for (const auto& f : after.findings) {
    if (std::find(before.findings.begin(), before.findings.end(), f) == before.findings.end()) added.push_back(f);
  }
  REQUIRE(added.size() == 1);
  CHECK(added[0].rule_id == "pmhf-exceeded");
  CHECK(added[0].subject_id == "SG-01");
  CHECK(after.findings.size() == before.findings.size() + 1);
}

TEST_CASE("empty model gives only the no-hazardous-events warning") {
  Report report = run_checks(t::parse({{"meta", t::meta("nothing")}}));
  CHECK(rule_ids(report) == std::vector<std::string>{"no-hazardous-events"});
  CHECK(report.summary.warnings == 1);
  CHECK(report.summary.errors == 0);
  CHECK(exit_code(report) == 0);
  CHECK(exit_code(report, true) == 1);
}

TEST_CASE("findings are sorted by severity, rule and subject") {
  Report report = run_checks(load_model(t::corpus_dir() / "adaptive_cruise.json"));
  REQUIRE(report.findings.size() > 3);
  for (std::size_t i = 1; i < report.findings.size(); ++i) {
    const auto& a = report.findings[i - 1];
    const auto& b = report.findings[i];
    CHECK(std::tuple(static_cast<int>(b.severity), a.rule_id, a.subject_id) <=
          std::tuple(static_cast<int>(a.severity), b.rule_id, b.subject_id));
  }
  for (const auto& f : report.findings) CHECK_NOTHROW(rule_info(f.rule_id));
}

TEST_CASE("render is deterministic and round-trips") {
  for (const auto& path : t::corpus_files()) {
    CAPTURE(path.filename().string());
    Report report = run_checks(load_model(path));
    const std::string first = render_report(report, ReportFormat::json);
    CHECK(render_report(report, ReportFormat::json) == first);
    CHECK(first.back() == '\n');
    CHECK(render_report(report, ReportFormat::text) == render_report(report, ReportFormat::text));
    CHECK(report_from_json(first) == report);
  }
}

TEST_CASE("text summary line") {
  Report report;
  report.item = "x";
  report.findings = {make_finding("unqualified-tool", "T-1", "m"), make_finding("unqualified-tool", "T-2", "m"),
                     make_finding("asil-lift-up", "SW-1", "m")};
  report.summary = {2, 1, 0};
  const std::string text = render_report(report, ReportFormat::text);
  CHECK(text.find("\n2 error(s), 1 warning(s)\n") != std::string::npos);
}
