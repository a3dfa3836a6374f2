#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "pseudomcf/cli.hpp"
#include "pseudomcf/errors.hpp"
#include "pseudomcf/parallel.hpp"

using namespace pseudomcf;
using namespace pseudomcf::cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "pseudomcf");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  set_thread_count(1);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("pseudomcf_cli_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("scenario parsing") {
  const auto s = parse_scenario(Json::parse(R"({"schema_version": 1, "case": "clifford_torus", "action": "identities", "N": 32})"));
  CHECK(s.case_name == "clifford_torus");
  CHECK(s.resolution == 32);
  const auto a = parse_scenario(Json::parse(R"({"schema_version": 1, "action": "alcurve", "kappa0": [0.3, 0.9], "target": "2/3"})"));
  CHECK(a.turns == 2);
  CHECK(a.periods == 3);
  CHECK(a.kappa_lo == 0.3);

  CHECK_THROWS_AS(parse_scenario(Json::parse(R"({"action": "flow", "case": "circle"})")), UsageError);
  CHECK_THROWS_AS(parse_scenario(Json::parse(R"({"schema_version": 2, "action": "flow", "case": "circle"})")), UsageError);
  CHECK_THROWS_AS(parse_scenario(Json::parse(R"({"schema_version": 1, "action": "flow", "case": "nope"})")), UsageError);
  CHECK_THROWS_AS(parse_scenario(Json::parse(R"({"schema_version": 1, "action": "flow", "case": "circle", "N": 4})")), UsageError);
  CHECK_THROWS_AS(parse_scenario(Json::parse(R"({"schema_version": 1, "action": "flow", "case": "circle", "extra": 1})")), UsageError);
  CHECK_THROWS_AS(parse_scenario(Json::parse(R"({"schema_version": 1, "action": "flow", "case": "circle", "N": "x"})")), UsageError);
  CHECK_THROWS_AS(parse_scenario(Json::parse(R"({"schema_version": 1, "action": "alcurve", "target": "2:3"})")), UsageError);
  CHECK_THROWS_AS(parse_scenario(Json::parse(R"({"schema_version": 1, "action": "flow", "case": "circle", "order": 3})")), UsageError);
  CHECK_THROWS_AS(parse_scenario(Json::parse(R"({"schema_version": 1, "action": "dance"})")), UsageError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/config.json"), UsageError);
}

TEST_CASE("identities scenario reports sups and a convergence table") {
  const auto dir = scratch("identities");
  const auto s = parse_scenario(Json::parse(
      R"({"schema_version": 1, "case": "clifford_torus", "action": "identities", "N": 32, "thresholds": {"shrinker": 1e-6}})"));
  const auto rep = run_scenario(s, dir.string());
  CHECK(rep.all_pass());
  const auto j = rep.to_json();
  CHECK(j["schema_version"] == 1);
  CHECK(j.contains("timing"));
  CHECK_FALSE(rep.payload().contains("timing"));
  bool saw_threshold = false;
  for (const auto& r : j["results"]) {
    CHECK(r.contains("sup"));
    CHECK(r.contains("mean"));
    CHECK(r.contains("threshold"));
    CHECK(r.contains("pass"));
    if (r["name"] == "shrinker") saw_threshold = r["threshold"].get<double>() == 1e-6;
  }
  CHECK(saw_threshold);
  CHECK(j["details"]["convergence"].contains("gauss"));
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(std::filesystem::exists(dir / "convergence.csv"));
  CHECK(std::filesystem::exists(dir / "residual_gauss.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("flow scenario writes the trajectory") {
  const auto dir = scratch("flow");
  const auto s = parse_scenario(Json::parse(
      R"({"schema_version": 1, "case": "circle", "action": "flow", "scheme": "rk4", "until": 0.4, "N": 64,
          "thresholds": {"norm_law": 1e-4, "c_fit": 1e-4}})"));
  const auto rep = run_scenario(s, dir.string());
  CHECK(rep.all_pass());
  CHECK(std::filesystem::exists(dir / "trajectory" / "manifest.json"));
  CHECK(std::filesystem::exists(dir / "trajectory" / "snapshot_0004.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("alcurve scenario") {
  const auto dir = scratch("alcurve");
  const auto ok = run_scenario(
      parse_scenario(Json::parse(R"({"schema_version": 1, "action": "alcurve", "kappa0": [0.3, 0.9], "target": "2/3"})")),
      dir.string());
  CHECK(ok.all_pass());
  CHECK(std::filesystem::exists(dir / "curve.csv"));
  const auto bad = run_scenario(
      parse_scenario(Json::parse(R"({"schema_version": 1, "action": "alcurve", "kappa0": [0.95, 0.99], "target": "2/3"})")));
  CHECK_FALSE(bad.all_pass());
  CHECK_FALSE(bad.payload()["details"]["alcurve"]["found"].get<bool>());
  std::filesystem::remove_all(dir);
}

TEST_CASE("threshold verdicts") {
  auto s = parse_scenario(Json::parse(R"({"schema_version": 1, "case": "hyperbolic_expander", "action": "diagnose", "N": 32})"));
  s.thresholds["shrinker"] = 1e-6;
  CHECK_FALSE(run_scenario(s).all_pass());
  s.thresholds.clear();
  s.thresholds["no_such_result"] = 1.0;
  CHECK_FALSE(run_scenario(s).all_pass());
}

TEST_CASE("catalog metadata") {
  const auto j = catalog_json();
  bool sphere = false;
  bool expander = false;
  for (const auto& e : j["catalog"]) {
    if (e["name"] == "sphere_m2") sphere = e["expected_h2"].get<double>() == 2.0;
    if (e["name"] == "hyperbolic_expander") expander = !e["shrinker"].get<bool>();
  }
  CHECK(sphere);
  CHECK(expander);
  CHECK(catalog_json().dump() == j.dump());
}

TEST_CASE("command line surface") {
  const auto cat = invoke({"catalog"});
  CHECK(cat.code == 0);
  CHECK(Json::parse(cat.out)["catalog"].size() > 5);

  const auto ids = invoke({"identities", "--case", "circle", "--resolution", "32", "--order", "2", "--threshold", "shrinker=1e-6"});
  CHECK(ids.code == 0);
  CHECK(Json::parse(ids.out)["grid"]["order"] == 2);

  CHECK(invoke({"identities", "--case", "circle", "--order", "3"}).code == 2);
  const auto unknown = invoke({"flow", "--case", "nope"});
  CHECK(unknown.code == 2);
  CHECK(Json::parse(unknown.err)["error"]["type"] == "usage");
  CHECK(invoke({"alcurve", "--kappa0", "0.95", "0.99", "--target", "2/3"}).code == 1);
  CHECK(invoke({"diagnose", "--case", "hyperbolic_expander", "--resolution", "32", "--threshold", "shrinker=1e-6"}).code == 1);
  CHECK(invoke({}).code == 2);

  const auto cfg = scratch("config.json");
  std::ofstream(cfg) << R"({"schema_version": 1, "case": "circle", "action": "flow", "until": 0.1, "N": 32})";
  const auto r = invoke({"run", cfg.string(), "--threads", "2"});
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["timing"]["threads"] == 2);
  std::filesystem::remove(cfg);
}

TEST_CASE("environment overrides the thread flag") {
  setenv("PSEUDOMCF_THREADS", "3", 1);
  const auto r = invoke({"flow", "--case", "circle", "--resolution", "32", "--until", "0.01", "--threads", "1"});
  CHECK(Json::parse(r.out)["timing"]["threads"] == 3);
  setenv("PSEUDOMCF_THREADS", "zero", 1);
  CHECK(invoke({"flow", "--case", "circle", "--resolution", "32", "--until", "0.01"}).code == 2);
  unsetenv("PSEUDOMCF_THREADS");
}

TEST_CASE("payload is identical for 1 and 8 workers") {
  const auto s = parse_scenario(Json::parse(
      R"({"schema_version": 1, "case": "twisted_torus", "action": "identities", "N": 32})"));
  set_thread_count(1);
  const auto a = run_scenario(s).payload().dump();
  set_thread_count(8);
  const auto b = run_scenario(s).payload().dump();
  set_thread_count(1);
  CHECK(a == b);
}
