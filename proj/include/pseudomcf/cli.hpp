#ifndef PSEUDOMCF_CLI_HPP_
#define PSEUDOMCF_CLI_HPP_

// Scenario configs, pipeline execution and JSON reports.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace pseudomcf::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct Scenario {
  int schema_version = kSchemaVersion;
  std::string name;
  std::string action;        // identities | flow | alcurve | diagnose
  std::string case_name;
  int resolution = 64;
  int order = 4;
  std::vector<std::string> identities;  // empty: all
  std::vector<int> ladder;              // convergence resolutions; empty: N/2, N
  std::string scheme = "rk4";
  double dt_alpha = 0.1;
  double until = 0.1;
  std::vector<double> snapshots;
  double kappa_lo = 0.3;
  double kappa_hi = 0.9;
  int turns = 2;
  int periods = 3;
  double ds = 1e-3;
  double tolerance = 1e-4;
  int max_iterations = 200;
  int curve_samples = 2000;
  // Upper bounds on result sups, by result name. "order:<identity>" entries
  // are lower bounds on measured convergence orders.
  std::map<std::string, double> thresholds;

  Json to_json() const;
};

// UsageError on unknown keys, wrong types or invalid values.
Scenario parse_scenario(const Json& config);
Scenario load_scenario(const std::string& path);

struct ResultLine {
  std::string name;
  std::optional<double> sup;
  std::optional<double> mean;
  std::optional<double> threshold;
  bool lower_bound = false;
  bool pass = true;
  std::string notice;
};

struct Report {
  Json scenario;
  Json grid;
  std::vector<ResultLine> results;
  Json details = Json::object();
  Json timing = Json::object();

  bool all_pass() const;
  // Everything except timing; identical for any worker count.
  Json payload() const;
  Json to_json() const;
};

// Runs the pipeline; artifacts go to out_dir when it is non-empty.
Report run_scenario(const Scenario& scenario, const std::string& out_dir = {});

Json catalog_json();

// Process entry point. Exit status: 0 all thresholds pass, 1 a threshold
// failed, 2 invalid usage or config, 3 numerical failure.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace pseudomcf::cli

#endif  // PSEUDOMCF_CLI_HPP_
