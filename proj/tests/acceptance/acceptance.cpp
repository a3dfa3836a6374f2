// Acceptance gate: one PASS/FAIL line per criterion.
//   acceptance            run every criterion
//   acceptance 3 7        run the listed criteria

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pseudomcf/alcurve.hpp"
#include "pseudomcf/catalog.hpp"
#include "pseudomcf/cli.hpp"
#include "pseudomcf/errors.hpp"
#include "pseudomcf/flow.hpp"
#include "pseudomcf/identities.hpp"
#include "pseudomcf/parallel.hpp"

using namespace pseudomcf;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

identities::ConvergenceStudy study(const std::string& id, const std::string& case_name, const std::vector<int>& ladder) {
  return identities::convergence_study(
      id, ladder, [&](int n) { return catalog::build_case(case_name, n); },
      [&](const geometry::Frame& f) { return identities::evaluate_identity(id, f); });
}

std::string describe(const identities::ConvergenceStudy& s) {
  std::string out = "sups";
  for (const auto& r : s.rows) out += fmt(" %.2e", r.sup);
  out += s.min_order ? fmt(", min order %.2f", *s.min_order) : std::string(", at rounding floor");
  return out;
}

Outcome criterion1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  flow::StepScheme scheme{flow::SchemeKind::rk4, 0.1, 4};
  std::vector<double> snaps;
  for (int i = 1; i < 8; ++i) snaps.push_back(0.05 * i);
  const auto tr = flow::run_flow(flow::initial_state(catalog::circle(256)), scheme, 0.4, snaps);
  const double elapsed = seconds_since(t0);
  const auto norms = flow::norm_evolution_check(tr);
  const auto homs = flow::homothety_detect(tr);
  double norm_err = 0.0;
  double c_err = 0.0;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    norm_err = std::max(norm_err, norms[i].sup_error);
    c_err = std::max(c_err, std::abs(homs[i].c_fit - 1.0 / std::sqrt(1.0 - 2.0 * norms[i].t)));
  }
  o.check(tr.report.t_final == 0.4 && !tr.report.guard_tripped, "reached t = 0.4");
  o.check(norm_err <= 1e-4, "sup | |F|^2 - (1 - 2t) | = " + fmt("%.2e", norm_err) + " <= 1e-4");
  o.check(c_err <= 1e-4, "sup |c_fit - (1 - 2t)^(-1/2)| = " + fmt("%.2e", c_err) + " <= 1e-4");
  o.check(elapsed <= 60.0, "runtime " + fmt("%.1f s", elapsed) + " <= 60 s");
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto state = flow::initial_state(catalog::hyperbolic_expander(1.0, 32));
  o.check(state.policy == flow::BoundaryPolicy::pinned_exact, "boundary pinned to the exact solution");
  const auto tr = flow::run_flow(state, flow::StepScheme{}, 1.0, {0.5});
  const double elapsed = seconds_since(t0);
  const auto norms = flow::norm_evolution_check(tr);
  o.check(tr.report.t_final == 1.0, "reached t = 1");
  o.check(norms.back().expected == -5.0, "expected |F|^2 = -1 - 4t = -5 at t = 1");
  o.check(norms.back().sup_error <= 1e-3, "interior sup error " + fmt("%.2e", norms.back().sup_error) + " <= 1e-3");
  o.check(elapsed <= 120.0, "runtime " + fmt("%.1f s", elapsed) + " <= 120 s");
  return o;
}

Outcome criterion3() {
  Outcome o;
  const std::vector<std::pair<std::string, std::vector<int>>> cases = {{"sphere_m2", {64, 128, 256}},
                                                                        {"clifford_torus", {16, 32, 64}}};
  for (const auto& [case_name, ladder] : cases) {
    for (const std::string id : {"shrinker", "parallel_principal_normal"}) {
      const auto s = study(id, case_name, ladder);
      o.check(s.rows.back().sup <= 1e-6, case_name + " " + id + " finest sup " + fmt("%.2e", s.rows.back().sup) + " <= 1e-6");
      o.check(s.satisfied(3.0), case_name + " " + id + " order >= 3 (" + describe(s) + ")");
    }
  }
  return o;
}

Outcome criterion4() {
  Outcome o;
  const std::vector<std::string> ids = {"gauss", "codazzi", "simons", "laplace_normF", "laplace_normH"};
  const std::vector<std::pair<std::string, std::vector<int>>> cases = {
      {"circle", {16, 32, 64, 128}}, {"clifford_torus", {16, 32, 64, 128}}, {"hyperbolic_expander", {24, 32, 48, 64}}};
  for (const auto& [case_name, ladder] : cases) {
    for (const auto& id : ids) {
      const auto s = study(id, case_name, ladder);
      o.check(s.satisfied(2.0), case_name + " " + id + " order >= 2 (" + describe(s) + ")");
    }
  }
  const geometry::Frame plane(catalog::affine_plane());
  for (const auto& id : ids) {
    const double sup = identities::evaluate_identity(id, plane).stats.sup;
    o.check(sup == 0.0, "affine_plane " + id + " = " + fmt("%.1e", sup) + " exactly 0");
  }
  return o;
}

Outcome criterion5() {
  Outcome o;
  {
    const geometry::Frame f(catalog::build_case("cylinder", 64));
    const auto r = identities::p_spectral_diagnostics(f, f.aux());
    double dev = 0.0;
    for (const auto& ev : r.eigenvalues) dev = std::max({dev, std::abs(ev[0] - 1.0), std::abs(ev[1])});
    double h2 = 0.0;
    for (std::size_t k = 0; k < f.nodes(); ++k)
      if (f.mask()[k]) h2 = std::max(h2, std::abs(f.mean_curvature_norm2()(k, 0) - 1.0));
    o.check(dev <= 1e-6, "cylinder P spectrum (1, 0), deviation " + fmt("%.2e", dev) + " <= 1e-6");
    o.check(r.sup_trace_defect <= 1e-12, "cylinder tr P = |H|^2, defect " + fmt("%.2e", r.sup_trace_defect));
    o.check(h2 <= 1e-6, "cylinder |H|^2 = 1, deviation " + fmt("%.2e", h2));
  }
  {
    const geometry::Frame f(catalog::build_case("al_cylinder", 256));
    const auto r = identities::p_spectral_diagnostics(f, f.aux());
    o.check(r.min_rank == 1 && r.max_rank == 1, "A&L cylinder: exactly one nonzero P eigenvalue at every node");
    o.check(r.aligned_nodes > 0 && r.min_alignment && *r.min_alignment >= 1.0 - 1e-6,
            "A&L cylinder: eigenvector / grad |H| alignment " + fmt("%.12f", r.min_alignment.value_or(0.0)) +
                " >= 1 - 1e-6 over " + std::to_string(r.aligned_nodes) + " nodes");
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  const geometry::Frame f(catalog::hyperbolic_expander(1.0, 48));
  const auto shr = identities::shrinker_residual(f);
  double h2dev = 0.0;
  double min_res = 1e300;
  for (std::size_t k = 0; k < f.nodes(); ++k) {
    if (!f.mask()[k]) continue;
    h2dev = std::max(h2dev, std::abs(f.mean_curvature_norm2()(k, 0) + 4.0));
    min_res = std::min(min_res, shr.field(k, 0));
  }
  o.check(h2dev <= 1e-6, "expander |H|^2 = -4, deviation " + fmt("%.2e", h2dev) + " <= 1e-6");
  o.check(min_res >= 3.0 - 1e-3, "expander shrinker residual min " + fmt("%.6f", min_res) + " >= 3 - 1e-3");
  bool rejected = false;
  try {
    flow::exact_hyperquadric_solution(catalog::lightcone_circle(32), 0.1);
  } catch (const DomainError&) {
    rejected = true;
  }
  o.check(rejected, "exact_hyperquadric_solution rejects k = 0 data");
  return o;
}

Outcome criterion7() {
  Outcome o;
  std::mt19937_64 rng(20240607);
  std::uniform_int_distribution<int> dim(2, 10);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  std::uniform_real_distribution<double> time(0.0, 10.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const int n = dim(rng);
    std::vector<double> x(static_cast<std::size_t>(n - 1));
    for (double& v : x) v = coord(rng);
    const double t = time(rng);
    const auto p = flow::lightcone_graph(x, t, n);
    const double defect = std::abs(ambient::norm2(p.point) + 2.0 * (n - 1) * t) / std::max(1.0, p.delta * p.delta);
    worst = std::max(worst, defect);
  }
  o.check(worst <= 1e-14, "10^4 samples, max relative defect " + fmt("%.2e", worst) + " <= 1e-14");
  return o;
}

Outcome criterion8() {
  Outcome o;
  alcurve::ShootOptions opt;
  opt.ds = 1e-3;
  const auto circle = alcurve::shoot({1.0, 0.0}, {0.0, 1.0}, opt);
  o.check(circle.closure.position_gap <= 1e-10, "circle closes, gap " + fmt("%.2e", circle.closure.position_gap));

  auto drift = [](double ds) {
    alcurve::ShootOptions so;
    so.ds = ds;
    so.keep_samples = false;
    const auto st = alcurve::extremal_start(0.5);
    return alcurve::shoot(st.gamma, st.tangent, so).max_conserved_drift;
  };
  const double d1 = drift(1e-3);
  o.check(d1 <= 1e-8, "conserved quantity drift per period " + fmt("%.2e", d1) + " <= 1e-8 at ds = 1e-3");
  const double coarse = drift(1e-2);
  const double fine = drift(5e-3);
  o.check(std::abs(coarse / fine - 16.0) <= 4.0,
          "drift ratio ds 1e-2 -> 5e-3 = " + fmt("%.2f", coarse / fine) + " in 16 +- 4");

  const auto st = alcurve::extremal_start(0.8);
  const auto shot = alcurve::shoot(st.gamma, st.tangent, opt);
  alcurve::IntrinsicState in{0.8, 0.0};
  double worst = 0.0;
  for (std::size_t i = 1; i < shot.samples.size(); ++i) {
    in = alcurve::intrinsic_step(in, shot.samples[i].s - shot.samples[i - 1].s);
    worst = std::max(worst, std::abs(in.kappa - shot.samples[i].kappa()));
  }
  o.check(worst <= 1e-6, "intrinsic vs extrinsic kappa over one oscillation " + fmt("%.2e", worst) + " <= 1e-6");

  const auto found = alcurve::find_closed(0.3, 0.9, 2, 3);
  o.check(found.found && found.curve && !found.curve->is_circle() && found.curve->closure_gap <= 1e-4,
          "find_closed 2/3: non-circular, gap " + fmt("%.2e", found.curve ? found.curve->closure_gap : -1.0));
  o.check(found.iterations <= 200, "find_closed used " + std::to_string(found.iterations) + " <= 200 iterations");
  return o;
}

std::map<std::string, std::string> artifacts(const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().filename() == "report.json") continue;
    std::ifstream in(e.path(), std::ios::binary);
    files[std::filesystem::relative(e.path(), dir).string()] =
        std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return files;
}

Outcome criterion9() {
  Outcome o;
  const std::vector<std::string> configs = {
      R"({"schema_version": 1, "name": "ids", "case": "twisted_torus", "action": "identities", "N": 32})",
      R"({"schema_version": 1, "name": "flow", "case": "hyperbolic_expander", "action": "flow", "N": 24, "until": 0.05})",
      R"({"schema_version": 1, "name": "diag", "case": "al_cylinder", "action": "diagnose", "N": 128})",
      R"({"schema_version": 1, "name": "curve", "action": "alcurve", "kappa0": [0.3, 0.9], "target": "2/3"})"};
  const auto root = std::filesystem::temp_directory_path() / "pseudomcf_acceptance_determinism";
  for (const auto& text : configs) {
    const auto s = cli::parse_scenario(cli::Json::parse(text));
    std::vector<std::string> payloads;
    std::vector<std::map<std::string, std::string>> files;
    for (int threads : {1, 8}) {
      const auto dir = root / (s.name + "_" + std::to_string(threads));
      std::filesystem::remove_all(dir);
      set_thread_count(threads);
      payloads.push_back(cli::run_scenario(s, dir.string()).payload().dump());
      files.push_back(artifacts(dir));
    }
    set_thread_count(1);
    o.check(payloads[0] == payloads[1], s.name + ": JSON payload identical for 1 and 8 workers");
    o.check(!files[0].empty() && files[0] == files[1],
            s.name + ": " + std::to_string(files[0].size()) + " artifact files identical");
  }
  std::filesystem::remove_all(root);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                          criterion6, criterion7, criterion8, criterion9};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty())
    for (int i = 1; i <= 9; ++i) selected.push_back(i);

  bool all = true;
  for (int c : selected) {
    if (c < 1 || c > 9) {
      std::printf("criterion %d: FAIL (no such criterion)\n", c);
      all = false;
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[static_cast<std::size_t>(c - 1)]();
    } catch (const std::exception& e) {
      out.check(false, std::string("exception: ") + e.what());
    }
    for (const auto& n : out.notes) std::printf("    %s\n", n.c_str());
    std::printf("criterion %d: %s (%.1f s)\n", c, out.pass ? "PASS" : "FAIL", seconds_since(t0));
    std::fflush(stdout);
    all = all && out.pass;
  }
  return all ? 0 : 1;
}
