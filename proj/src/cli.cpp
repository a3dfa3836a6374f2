#include "pseudomcf/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "pseudomcf/alcurve.hpp"
#include "pseudomcf/catalog.hpp"
#include "pseudomcf/errors.hpp"
#include "pseudomcf/flow.hpp"
#include "pseudomcf/geometry.hpp"
#include "pseudomcf/identities.hpp"
#include "pseudomcf/parallel.hpp"

namespace pseudomcf::cli {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kActions = {"identities", "flow", "alcurve", "diagnose", "catalog"};

template <class T>
T get_as(const Json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw UsageError("config key '" + key + "' has the wrong type");
  }
}

std::pair<int, int> parse_ratio(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) throw UsageError("target must look like p/q, got '" + text + "'");
  try {
    std::size_t used = 0;
    const int p = std::stoi(text.substr(0, slash), &used);
    if (used != slash) throw UsageError("bad target '" + text + "'");
    const std::string rest = text.substr(slash + 1);
    const int q = std::stoi(rest, &used);
    if (used != rest.size()) throw UsageError("bad target '" + text + "'");
    return {p, q};
  } catch (const std::logic_error&) {
    throw UsageError("target must look like p/q, got '" + text + "'");
  }
}

void validate(const Scenario& s) {
  if (s.schema_version != kSchemaVersion) {
    throw UsageError("unsupported schema_version " + std::to_string(s.schema_version));
  }
  if (!kActions.count(s.action)) throw UsageError("unknown action '" + s.action + "'");
  if (s.action == "identities" || s.action == "flow" || s.action == "diagnose") {
    if (s.case_name.empty()) throw UsageError("action '" + s.action + "' needs a case");
    catalog::entry(s.case_name);
  }
  if (s.resolution < 8) throw UsageError("resolution must be at least 8");
  if (s.order != 2 && s.order != 4) throw UsageError("order must be 2 or 4");
  for (const auto& name : s.identities) {
    const auto& known = identities::identity_names();
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw UsageError("unknown identity '" + name + "'");
    }
  }
  for (std::size_t i = 0; i < s.ladder.size(); ++i) {
    if (s.ladder[i] < 8) throw UsageError("ladder resolutions must be at least 8");
    if (i > 0 && s.ladder[i] <= s.ladder[i - 1]) throw UsageError("ladder must increase");
  }
  flow::parse_scheme(s.scheme);
  if (!(s.dt_alpha > 0.0 && s.dt_alpha <= 0.5)) throw UsageError("dt_alpha must lie in (0, 0.5]");
  if (!(s.until > 0.0)) throw UsageError("until must be positive");
  for (double t : s.snapshots)
    if (!(t > 0.0 && t <= s.until)) throw UsageError("snapshot times must lie in (0, until]");
  if (!(s.kappa_lo > 0.0 && s.kappa_lo < s.kappa_hi)) throw UsageError("kappa0 must be an interval 0 < lo < hi");
  if (s.turns < 1 || s.periods < 1) throw UsageError("target p/q needs positive integers");
  if (!(s.ds > 0.0)) throw UsageError("ds must be positive");
  if (!(s.tolerance > 0.0)) throw UsageError("tolerance must be positive");
  if (s.max_iterations < 1) throw UsageError("max_iterations must be positive");
  if (s.curve_samples < 2) throw UsageError("curve_samples must be at least 2");
}

Json grid_json(const geometry::ImmersionSample& sample, int order) {
  Json axes = Json::array();
  for (const auto& ax : sample.domain.axes()) {
    axes.push_back({{"lo", ax.lo}, {"hi", ax.hi}, {"count", ax.count}, {"periodic", ax.periodic}});
  }
  return {{"case", sample.name},
          {"m", sample.dim()},
          {"signature", {{"q", sample.signature.index()}, {"n", sample.signature.dim()}}},
          {"nodes", sample.domain.node_count()},
          {"axes", axes},
          {"order", order}};
}

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

ResultLine upper(const std::string& name, double sup, std::optional<double> mean, const Scenario& s) {
  ResultLine line{name, sup, mean, std::nullopt, false, true, {}};
  if (auto it = s.thresholds.find(name); it != s.thresholds.end()) {
    line.threshold = it->second;
    line.pass = sup <= it->second;
  }
  return line;
}

ResultLine missing(const std::string& name, const std::string& notice, const Scenario& s) {
  ResultLine line{name, std::nullopt, std::nullopt, std::nullopt, false, true, notice};
  if (auto it = s.thresholds.find(name); it != s.thresholds.end()) {
    line.threshold = it->second;
    line.pass = false;
  }
  return line;
}

std::ofstream open_out(const std::string& dir, const std::string& file) {
  std::ofstream out(fs::path(dir) / file);
  if (!out) throw Error("cannot write " + (fs::path(dir) / file).string());
  return out;
}

void run_identities(const Scenario& s, const std::string& out_dir, Report& rep) {
  const auto sample = catalog::build_case(s.case_name, s.resolution);
  rep.grid = grid_json(sample, s.order);
  geometry::GeometryOptions opt;
  opt.order = s.order;
  const geometry::Frame frame(sample, opt);
  const auto names = s.identities.empty() ? identities::identity_names() : s.identities;
  for (const auto& name : names) {
    try {
      const auto r = identities::evaluate_identity(name, frame);
      if (r.skipped) {
        rep.results.push_back(missing(name, r.notice, s));
        continue;
      }
      rep.results.push_back(upper(name, r.stats.sup, r.stats.mean, s));
      if (!out_dir.empty()) {
        auto out = open_out(out_dir, "residual_" + name + ".csv");
        mesh::write_csv(out, r.field, {"residual"});
      }
    } catch (const UsageError& e) {
      rep.results.push_back(missing(name, e.what(), s));
    } catch (const NullMeanCurvatureError& e) {
      rep.results.push_back(missing(name, e.what(), s));
    }
  }
  std::vector<int> ladder = s.ladder;
  if (ladder.empty() && s.resolution / 2 >= 8) ladder = {s.resolution / 2, s.resolution};
  if (ladder.empty()) return;

  Json conv = Json::object();
  std::ostringstream csv;
  csv.imbue(std::locale::classic());
  csv.precision(17);
  csv << "identity,resolution,h,sup,mean,order\n";
  const auto factory = [&](int n) { return catalog::build_case(s.case_name, n); };
  for (const auto& name : names) {
    const std::string key = "order:" + name;
    try {
      const auto study = identities::convergence_study(
          name, ladder, factory, [&](const geometry::Frame& f) { return identities::evaluate_identity(name, f); },
          opt);
      Json rows = Json::array();
      for (const auto& row : study.rows) {
        rows.push_back({{"resolution", row.resolution},
                        {"h", row.h},
                        {"sup", row.sup},
                        {"mean", row.mean},
                        {"order", opt_json(row.order)}});
        csv << name << ',' << row.resolution << ',' << row.h << ',' << row.sup << ',' << row.mean << ',';
        if (row.order) csv << *row.order;
        csv << '\n';
      }
      conv[name] = {{"rows", rows}, {"min_order", opt_json(study.min_order)}, {"floor", study.floor}};
      ResultLine line{key, study.min_order, std::nullopt, std::nullopt, true, true, {}};
      if (!study.min_order) line.notice = "finest residual at the rounding floor";
      if (auto it = s.thresholds.find(key); it != s.thresholds.end()) {
        line.threshold = it->second;
        line.pass = study.satisfied(it->second);
      }
      rep.results.push_back(line);
    } catch (const UsageError& e) {
      auto line = missing(key, e.what(), s);
      line.lower_bound = true;
      rep.results.push_back(line);
    } catch (const NullMeanCurvatureError& e) {
      auto line = missing(key, e.what(), s);
      line.lower_bound = true;
      rep.results.push_back(line);
    }
  }
  rep.details["convergence"] = conv;
  if (!out_dir.empty()) open_out(out_dir, "convergence.csv") << csv.str();
}

void run_flow_action(const Scenario& s, const std::string& out_dir, Report& rep) {
  const auto sample = catalog::build_case(s.case_name, s.resolution);
  rep.grid = grid_json(sample, s.order);
  const auto state = flow::initial_state(sample);
  flow::StepScheme scheme;
  scheme.kind = flow::parse_scheme(s.scheme);
  scheme.alpha = s.dt_alpha;
  scheme.order = s.order;
  std::vector<double> times = s.snapshots;
  if (times.empty())
    for (int i = 1; i < 4; ++i) times.push_back(s.until * i / 4.0);
  const auto traj = flow::run_flow(state, scheme, s.until, times);

  const char* policy = state.policy == flow::BoundaryPolicy::none           ? "none"
                       : state.policy == flow::BoundaryPolicy::pinned_exact ? "pinned_exact"
                                                                            : "frozen";
  rep.details["flow"] = {{"scheme", flow::to_string(scheme.kind)},
                         {"boundary", policy},
                         {"steps", traj.report.steps},
                         {"t_final", traj.report.t_final},
                         {"guard_tripped", traj.report.guard_tripped},
                         {"halted", traj.report.halted},
                         {"reason", traj.report.reason}};
  ResultLine reached{"t_final", traj.report.t_final, std::nullopt, s.until, true,
                     traj.report.t_final >= s.until, traj.report.reason};
  rep.results.push_back(reached);

  const auto homs = flow::homothety_detect(traj);
  try {
    const auto norms = flow::norm_evolution_check(traj);
    const double k = flow::hyperquadric_level(sample);
    const int m = sample.dim();
    double sup = 0.0;
    double c_err = 0.0;
    Json rows = Json::array();
    for (std::size_t i = 0; i < norms.size(); ++i) {
      sup = std::max(sup, norms[i].sup_error);
      const double c_exact = flow::homothety_factor(k, m, norms[i].t);
      c_err = std::max(c_err, std::abs(homs[i].c_fit - c_exact));
      rows.push_back({{"t", norms[i].t},
                      {"expected_norm2", norms[i].expected},
                      {"sup_error", norms[i].sup_error},
                      {"mean_error", norms[i].mean_error},
                      {"c_fit", homs[i].c_fit},
                      {"c_exact", c_exact},
                      {"homothety_residual", homs[i].residual}});
    }
    rep.details["norm_law"] = rows;
    rep.results.push_back(upper("norm_law", sup, norms.back().mean_error, s));
    rep.results.push_back(upper("c_fit", c_err, std::nullopt, s));
  } catch (const UsageError& e) {
    rep.results.push_back(missing("norm_law", e.what(), s));
    rep.results.push_back(missing("c_fit", e.what(), s));
  } catch (const DomainError& e) {
    rep.results.push_back(missing("norm_law", e.what(), s));
    rep.results.push_back(missing("c_fit", e.what(), s));
  }
  double hres = 0.0;
  for (const auto& h : homs) hres = std::max(hres, h.residual);
  rep.results.push_back(upper("homothety_residual", hres, std::nullopt, s));
  if (!out_dir.empty()) flow::export_trajectory((fs::path(out_dir) / "trajectory").string(), traj);
}

void run_alcurve(const Scenario& s, const std::string& out_dir, Report& rep) {
  alcurve::FindOptions opt;
  opt.ds = s.ds;
  opt.tolerance = s.tolerance;
  opt.max_iterations = s.max_iterations;
  const auto res = alcurve::find_closed(s.kappa_lo, s.kappa_hi, s.turns, s.periods, opt);
  rep.grid = {{"ds", s.ds}, {"kappa0", {s.kappa_lo, s.kappa_hi}}, {"target", {s.turns, s.periods}}};
  Json d = {{"found", res.found},
            {"iterations", res.iterations},
            {"bracket", {res.lo, res.hi}},
            {"residual_at_bracket", {res.f_lo, res.f_hi}},
            {"message", res.message}};
  if (res.curve) {
    const auto& c = *res.curve;
    d["curve"] = {{"kappa0", c.kappa0},
                  {"turns", c.turns},
                  {"periods", c.periods},
                  {"period_length", c.period_length},
                  {"total_length", c.total_length},
                  {"closure_gap", c.closure_gap},
                  {"circle", c.is_circle()}};
  }
  rep.details["alcurve"] = d;
  ResultLine line{"closure_gap", std::nullopt, std::nullopt, s.tolerance, false, false, res.message};
  if (res.found && res.curve) {
    line.sup = res.curve->closure_gap;
    line.pass = res.curve->closure_gap <= s.tolerance;
  }
  rep.results.push_back(line);
  ResultLine iters{"iterations", static_cast<double>(res.iterations), std::nullopt,
                   static_cast<double>(s.max_iterations), false, res.iterations <= s.max_iterations, {}};
  rep.results.push_back(iters);
  if (!out_dir.empty() && res.curve) {
    auto out = open_out(out_dir, "curve.csv");
    alcurve::write_curve_csv(out, res.curve->resample(s.curve_samples));
  }
}

void run_diagnose(const Scenario& s, const std::string& out_dir, Report& rep) {
  const auto sample = catalog::build_case(s.case_name, s.resolution);
  rep.grid = grid_json(sample, s.order);
  geometry::GeometryOptions opt;
  opt.order = s.order;
  const geometry::Frame frame(sample, opt);
  const auto& e = catalog::entry(s.case_name);
  const auto& mask = frame.mask();
  const auto& h2 = frame.mean_curvature_norm2();

  Json d;
  d["spacelike"] = frame.spacelike();
  double lo = 0.0;
  double hi = 0.0;
  bool first = true;
  for (std::size_t k = 0; k < frame.nodes(); ++k) {
    if (!mask[k]) continue;
    lo = first ? h2(k, 0) : std::min(lo, h2(k, 0));
    hi = first ? h2(k, 0) : std::max(hi, h2(k, 0));
    first = false;
  }
  d["h2_range"] = {lo, hi};
  if (e.expected_h2) {
    std::vector<double> dev(frame.nodes());
    for (std::size_t k = 0; k < dev.size(); ++k) dev[k] = std::abs(h2(k, 0) - *e.expected_h2);
    const auto st = mesh::masked_stats(dev, mask);
    rep.results.push_back(upper("h2_deviation", st.sup, st.mean, s));
  }
  for (const std::string name : {"shrinker", "parallel_principal_normal"}) {
    try {
      const auto r = identities::evaluate_identity(name, frame);
      rep.results.push_back(upper(name, r.stats.sup, r.stats.mean, s));
    } catch (const NullMeanCurvatureError& err) {
      rep.results.push_back(missing(name, err.what(), s));
    }
  }
  try {
    const auto fit = identities::fit_homothety(frame);
    d["homothety"] = {{"lambda", fit.lambda}, {"sup_defect", fit.sup_defect}};
  } catch (const UsageError& err) {
    d["homothety"] = {{"notice", err.what()}};
  }

  const auto aux = frame.aux();
  const auto ps = identities::p_spectral_diagnostics(frame, aux);
  d["p_spectrum"] = {{"min_rank", ps.min_rank},
                     {"max_rank", ps.max_rank},
                     {"rank_tol", ps.rank_tol},
                     {"aligned_nodes", ps.aligned_nodes},
                     {"min_alignment", opt_json(ps.min_alignment)},
                     {"shrinker_sup", ps.shrinker_sup}};
  if (ps.items_evaluated) {
    d["p_spectrum"]["parallel_normal_items"] = {ps.item1, ps.item2, ps.item3, ps.item4};
  } else {
    d["p_spectrum"]["parallel_normal_items"] = nullptr;
    d["p_spectrum"]["notice"] = ps.notice;
  }
  rep.results.push_back(upper("p_trace_defect", ps.sup_trace_defect, std::nullopt, s));
  rep.results.push_back(upper("p_idempotency", ps.sup_idempotency, std::nullopt, s));
  if (ps.min_alignment) {
    rep.results.push_back(upper("p_misalignment", 1.0 - *ps.min_alignment, std::nullopt, s));
  }
  if (e.p_spectrum && !ps.eigenvalues.empty()) {
    double dev = 0.0;
    for (const auto& ev : ps.eigenvalues) {
      for (std::size_t i = 0; i < ev.size() && i < e.p_spectrum->size(); ++i) {
        dev = std::max(dev, std::abs(ev[i] - (*e.p_spectrum)[i]));
      }
    }
    rep.results.push_back(upper("p_spectrum_deviation", dev, std::nullopt, s));
  }

  try {
    const auto bg = identities::bounded_geometry_report(frame, 1);
    d["bounded_geometry"] = {{"c", bg.c},
                             {"d", bg.d},
                             {"sup_inverse_h", opt_json(bg.sup_inverse_h)},
                             {"growth_exponent", opt_json(bg.growth_exponent)},
                             {"inverse_lipschitz", bg.inverse_lipschitz},
                             {"sampled_pairs", bg.sampled_pairs}};
  } catch (const UsageError& err) {
    d["bounded_geometry"] = {{"notice", err.what()}};
  }
  rep.details["diagnose"] = d;

  if (!out_dir.empty()) {
    auto out = open_out(out_dir, "p_eigenvalues.csv");
    out.imbue(std::locale::classic());
    out.precision(17);
    out << "node";
    for (int i = 0; i < frame.dim(); ++i) out << ",lambda" << i;
    out << '\n';
    std::size_t row = 0;
    for (std::size_t k = 0; k < frame.nodes(); ++k) {
      if (!mask[k]) continue;
      out << k;
      for (double v : ps.eigenvalues[row]) out << ',' << v;
      out << '\n';
      ++row;
    }
  }
}

Json error_json(const std::string& type, const std::string& message) {
  return {{"error", {{"type", type}, {"message", message}}}};
}

}  // namespace

Json Scenario::to_json() const {
  Json j = {{"schema_version", schema_version}, {"name", name}, {"action", action}};
  if (action == "identities" || action == "flow" || action == "diagnose") {
    j["case"] = case_name;
    j["N"] = resolution;
    j["order"] = order;
  }
  if (action == "identities") {
    j["identities"] = identities;
    j["ladder"] = ladder;
  }
  if (action == "flow") {
    j["scheme"] = scheme;
    j["dt_alpha"] = dt_alpha;
    j["until"] = until;
    j["snapshots"] = snapshots;
  }
  if (action == "alcurve") {
    j["kappa0"] = {kappa_lo, kappa_hi};
    j["target"] = std::to_string(turns) + "/" + std::to_string(periods);
    j["ds"] = ds;
    j["tolerance"] = tolerance;
    j["max_iterations"] = max_iterations;
    j["curve_samples"] = curve_samples;
  }
  Json th = Json::object();
  for (const auto& [k, v] : thresholds) th[k] = v;
  j["thresholds"] = th;
  return j;
}

Scenario parse_scenario(const Json& config) {
  if (!config.is_object()) throw UsageError("config must be a JSON object");
  Scenario s;
  if (!config.contains("schema_version")) throw UsageError("config needs schema_version");
  for (const auto& [key, v] : config.items()) {
    if (key == "schema_version") {
      s.schema_version = get_as<int>(v, key);
    } else if (key == "name") {
      s.name = get_as<std::string>(v, key);
    } else if (key == "action") {
      s.action = get_as<std::string>(v, key);
    } else if (key == "case") {
      s.case_name = get_as<std::string>(v, key);
    } else if (key == "N" || key == "resolution") {
      s.resolution = get_as<int>(v, key);
    } else if (key == "order") {
      s.order = get_as<int>(v, key);
    } else if (key == "identities") {
      s.identities = get_as<std::vector<std::string>>(v, key);
    } else if (key == "ladder") {
      s.ladder = get_as<std::vector<int>>(v, key);
    } else if (key == "scheme") {
      s.scheme = get_as<std::string>(v, key);
    } else if (key == "dt_alpha") {
      s.dt_alpha = get_as<double>(v, key);
    } else if (key == "until") {
      s.until = get_as<double>(v, key);
    } else if (key == "snapshots") {
      s.snapshots = get_as<std::vector<double>>(v, key);
    } else if (key == "kappa0") {
      const auto k = get_as<std::vector<double>>(v, key);
      if (k.size() != 2) throw UsageError("kappa0 must be [lo, hi]");
      s.kappa_lo = k[0];
      s.kappa_hi = k[1];
    } else if (key == "target") {
      std::tie(s.turns, s.periods) = parse_ratio(get_as<std::string>(v, key));
    } else if (key == "ds") {
      s.ds = get_as<double>(v, key);
    } else if (key == "tolerance") {
      s.tolerance = get_as<double>(v, key);
    } else if (key == "max_iterations") {
      s.max_iterations = get_as<int>(v, key);
    } else if (key == "curve_samples") {
      s.curve_samples = get_as<int>(v, key);
    } else if (key == "thresholds") {
      s.thresholds = get_as<std::map<std::string, double>>(v, key);
    } else {
      throw UsageError("unknown config key '" + key + "'");
    }
  }
  if (s.action.empty()) throw UsageError("config needs an action");
  validate(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("config " + path + " is not valid JSON: " + e.what());
  }
  return parse_scenario(j);
}

bool Report::all_pass() const {
  return std::all_of(results.begin(), results.end(), [](const ResultLine& r) { return r.pass; });
}

Json Report::payload() const {
  Json res = Json::array();
  for (const auto& r : results) {
    Json line = {{"name", r.name},
                 {"sup", opt_json(r.sup)},
                 {"mean", opt_json(r.mean)},
                 {"threshold", opt_json(r.threshold)},
                 {"pass", r.pass}};
    if (r.threshold) line["bound"] = r.lower_bound ? "lower" : "upper";
    if (!r.notice.empty()) line["notice"] = r.notice;
    res.push_back(line);
  }
  Json j = {{"schema_version", kSchemaVersion}, {"scenario", scenario}, {"grid", grid}, {"results", res}};
  j["pass"] = all_pass();
  if (!details.empty()) j["details"] = details;
  return j;
}

Json Report::to_json() const {
  Json j = payload();
  j["timing"] = timing;
  return j;
}

Report run_scenario(const Scenario& s, const std::string& out_dir) {
  validate(s);
  const auto start = std::chrono::steady_clock::now();
  if (!out_dir.empty()) fs::create_directories(out_dir);
  Report rep;
  rep.scenario = s.to_json();
  rep.grid = Json::object();
  if (s.action == "identities") {
    run_identities(s, out_dir, rep);
  } else if (s.action == "flow") {
    run_flow_action(s, out_dir, rep);
  } else if (s.action == "alcurve") {
    run_alcurve(s, out_dir, rep);
  } else if (s.action == "diagnose") {
    run_diagnose(s, out_dir, rep);
  } else {
    rep.details["catalog"] = catalog_json();
  }
  for (const auto& [name, bound] : s.thresholds) {
    const bool used = std::any_of(rep.results.begin(), rep.results.end(),
                                  [&](const ResultLine& r) { return r.name == name; });
    if (!used) rep.results.push_back(missing(name, "no result with this name", s));
  }
  rep.timing = {{"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()},
                {"threads", thread_count()}};
  if (!out_dir.empty()) open_out(out_dir, "report.json") << rep.to_json().dump(2) << "\n";
  return rep;
}

Json catalog_json() {
  Json list = Json::array();
  for (const auto& e : catalog::list_catalog()) {
    list.push_back({{"name", e.name},
                    {"m", e.m},
                    {"signature", {{"q", e.q}, {"n", e.n}}},
                    {"k", opt_json(e.k)},
                    {"expected_h2", opt_json(e.expected_h2)},
                    {"p_spectrum", e.p_spectrum ? Json(*e.p_spectrum) : Json(nullptr)},
                    {"p_structure", e.p_structure},
                    {"shrinker", e.shrinker},
                    {"expander", e.expander},
                    {"spacelike", e.spacelike},
                    {"description", e.description}});
  }
  return {{"schema_version", kSchemaVersion}, {"catalog", list}};
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Curvature identities, mean curvature flow and shrinking curves for sampled immersions"};
  app.require_subcommand(1);
  int threads = 1;
  std::string out_dir;
  Scenario s;
  std::string config_path;
  std::string target = "2/3";
  std::vector<double> kappa0;
  std::vector<std::string> threshold_args;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--threads", threads, "Worker count")->check(CLI::PositiveNumber);
    sub->add_option("--threshold", threshold_args, "NAME=VALUE upper bound on a result");
  };
  auto grid = [&](CLI::App* sub) {
    sub->add_option("--case", s.case_name, "Catalog case")->required();
    sub->add_option("--resolution", s.resolution, "Nodes per periodic axis");
    sub->add_option("--order", s.order, "Stencil order")->check(CLI::IsMember({2, 4}));
  };

  auto* cat = app.add_subcommand("catalog", "List catalog entries as JSON");
  auto* ids = app.add_subcommand("identities", "Evaluate the identity suite on a case");
  grid(ids);
  common(ids);
  ids->add_option("--identity", s.identities, "Restrict to these identities");
  ids->add_option("--ladder", s.ladder, "Resolutions for a convergence study");
  auto* flw = app.add_subcommand("flow", "Run mean curvature flow on a case");
  grid(flw);
  common(flw);
  flw->add_option("--scheme", s.scheme, "rk4 or euler");
  flw->add_option("--dt-alpha", s.dt_alpha, "dt = alpha h_min^2");
  flw->add_option("--until", s.until, "Final time");
  flw->add_option("--snapshot", s.snapshots, "Snapshot times");
  auto* alc = app.add_subcommand("alcurve", "Search for a closed homothetic curve");
  common(alc);
  alc->add_option("--kappa0", kappa0, "Bracket lo hi")->expected(2);
  alc->add_option("--target", target, "Winding ratio p/q");
  alc->add_option("--ds", s.ds, "Arc-length step");
  alc->add_option("--tolerance", s.tolerance, "Closure tolerance");
  alc->add_option("--max-iterations", s.max_iterations, "Shooting budget");
  auto* dia = app.add_subcommand("diagnose", "Self-similarity diagnostics for a case");
  grid(dia);
  common(dia);
  auto* runc = app.add_subcommand("run", "Run a JSON scenario file");
  runc->add_option("config", config_path, "Scenario file")->required();
  common(runc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (const char* env = std::getenv("PSEUDOMCF_THREADS"); env && *env) {
      try {
        threads = std::stoi(env);
      } catch (const std::logic_error&) {
        throw UsageError(std::string("PSEUDOMCF_THREADS is not an integer: ") + env);
      }
      if (threads < 1) throw UsageError("PSEUDOMCF_THREADS must be positive");
    }
    set_thread_count(threads);

    if (cat->parsed()) {
      out << catalog_json().dump(2) << "\n";
      return 0;
    }
    if (runc->parsed()) {
      s = load_scenario(config_path);
    } else {
      s.action = ids->parsed() ? "identities" : flw->parsed() ? "flow" : alc->parsed() ? "alcurve" : "diagnose";
      s.name = s.action;
      if (alc->parsed()) {
        if (!kappa0.empty()) {
          s.kappa_lo = kappa0[0];
          s.kappa_hi = kappa0[1];
        }
        std::tie(s.turns, s.periods) = parse_ratio(target);
      }
    }
    for (const auto& arg : threshold_args) {
      const auto eq = arg.find('=');
      if (eq == std::string::npos) throw UsageError("threshold must be NAME=VALUE, got '" + arg + "'");
      try {
        s.thresholds[arg.substr(0, eq)] = std::stod(arg.substr(eq + 1));
      } catch (const std::logic_error&) {
        throw UsageError("bad threshold value in '" + arg + "'");
      }
    }
    const auto rep = run_scenario(s, out_dir);
    out << rep.to_json().dump(2) << "\n";
    return rep.all_pass() ? 0 : 1;
  } catch (const UsageError& e) {
    err << error_json("usage", e.what()).dump() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << error_json("domain", e.what()).dump() << "\n";
    return 2;
  } catch (const DegenerateMetricError& e) {
    err << error_json("degenerate_metric", e.what()).dump() << "\n";
    return 3;
  } catch (const NullMeanCurvatureError& e) {
    err << error_json("null_mean_curvature", e.what()).dump() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << error_json("error", e.what()).dump() << "\n";
    return 3;
  }
}

}  // namespace pseudomcf::cli
