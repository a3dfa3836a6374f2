#include "pseudomcf/flow.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "pseudomcf/errors.hpp"
#include "pseudomcf/parallel.hpp"

namespace pseudomcf::flow {

namespace {

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

double scale_factor(double k, int m, double t) { return std::sqrt((k - 2.0 * m * t) / k); }

// Per-node flag: inside the pin band of a patch boundary.
std::vector<unsigned char> pin_band(const mesh::ParamDomain& dom, int width) {
  const auto inner = mesh::interior_mask(dom, width);
  std::vector<unsigned char> band(dom.node_count());
  for (std::size_t k = 0; k < band.size(); ++k) band[k] = inner.inside[k] ? 0 : 1;
  return band;
}

GridField velocity(const ImmersionSample& sample, const FlowState& st, double t, int order,
                   const std::vector<unsigned char>& band) {
  geometry::GeometryOptions opt;
  opt.order = order;
  opt.mask_width = st.policy == BoundaryPolicy::none ? 0 : st.pin_width;
  const geometry::Frame frame(sample, opt);
  GridField v = frame.mean_curvature();
  if (st.policy == BoundaryPolicy::none) return v;
  const int n = sample.signature.dim();
  double rate = 0.0;
  if (st.policy == BoundaryPolicy::pinned_exact) {
    const auto& pin = *st.pin;
    rate = -pin.m / (pin.k * scale_factor(pin.k, pin.m, t));
  }
  for (std::size_t k = 0; k < sample.positions.nodes(); ++k) {
    if (!band[k]) continue;
    for (int c = 0; c < n; ++c) {
      v(k, sz(c)) = st.policy == BoundaryPolicy::pinned_exact ? rate * st.pin->initial(k, sz(c)) : 0.0;
    }
  }
  return v;
}

void check_finite(const GridField& f) {
  for (double x : f.data()) {
    if (!std::isfinite(x)) throw DegenerateMetricError("non-finite positions after flow step", 0);
  }
}

}  // namespace

std::string to_string(SchemeKind kind) { return kind == SchemeKind::rk4 ? "rk4" : "euler"; }

SchemeKind parse_scheme(const std::string& name) {
  if (name == "rk4") return SchemeKind::rk4;
  if (name == "euler" || name == "explicit-euler" || name == "explicit_euler") return SchemeKind::explicit_euler;
  throw UsageError("unknown scheme '" + name + "' (expected rk4 or euler)");
}

double hyperquadric_level(const ImmersionSample& sample, double rel_tol) {
  const auto& sig = sample.signature;
  const std::size_t nodes = sample.positions.nodes();
  double sum = 0.0;
  double scale = 0.0;
  for (std::size_t k = 0; k < nodes; ++k) {
    sum += ambient::norm2(sig, sample.positions.value(k, 0));
    scale = std::max(scale, ambient::euclidean_norm2(sample.positions.value(k, 0)));
  }
  const double level = sum / static_cast<double>(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    const double v = ambient::norm2(sig, sample.positions.value(k, 0));
    if (std::abs(v - level) > rel_tol * std::max(1.0, scale)) {
      throw UsageError("sample does not lie on a hyperquadric: <F,F> varies by " + std::to_string(std::abs(v - level)));
    }
  }
  return level;
}

double homothety_factor(double k, int m, double t) {
  if (k == 0.0) throw DomainError("no hyperquadric homothety with k = 0");
  const double rest = k - 2.0 * m * t;
  if (rest / k <= 0.0) throw DomainError("t = " + std::to_string(t) + " is past the extinction time k/2m");
  return std::sqrt(k / rest);
}

ImmersionSample exact_hyperquadric_solution(const ImmersionSample& initial, double t) {
  const double k = hyperquadric_level(initial);
  double scale = 0.0;
  for (double x : initial.positions.data()) scale = std::max(scale, std::abs(x));
  if (std::abs(k) <= 1e-12 * std::max(1.0, scale * scale)) {
    throw DomainError("initial data lies on the light cone (k = 0): no hyperquadric homothety exists");
  }
  const int m = initial.dim();
  if (k > 0.0 && t >= k / (2.0 * m)) {
    throw DomainError("t = " + std::to_string(t) + " reaches the extinction time k/2m = " + std::to_string(k / (2.0 * m)));
  }
  const double s = 1.0 / homothety_factor(k, m, t);
  GridField pos = initial.positions;
  for (double& x : pos.data()) x *= s;
  return ImmersionSample(initial.domain, initial.signature, std::move(pos), initial.name);
}

FlowState initial_state(const ImmersionSample& sample) {
  FlowState st{0.0, sample, BoundaryPolicy::none, std::nullopt, 2};
  if (sample.domain.fully_periodic()) return st;
  st.policy = BoundaryPolicy::frozen;
  try {
    const double k = hyperquadric_level(sample);
    if (std::abs(k) > 1e-12) {
      st.policy = BoundaryPolicy::pinned_exact;
      st.pin = ExactPin{sample.positions, k, sample.dim()};
    }
  } catch (const UsageError&) {
  }
  return st;
}

double min_spacing(const ImmersionSample& sample, int order) {
  const auto tangents = mesh::gradient(sample.positions, order);
  const auto& dom = sample.domain;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < dom.node_count(); ++k) {
    for (int a = 0; a < dom.dim(); ++a) {
      const double gaa = ambient::norm2(sample.signature, tangents.value(k, sz(a)));
      best = std::min(best, std::sqrt(std::abs(gaa)) * dom.spacing(a));
    }
  }
  return best;
}

FlowState mcf_step(const FlowState& state, const StepScheme& scheme, double dt) {
  if (!(scheme.alpha > 0.0 && scheme.alpha <= 0.5)) throw UsageError("dt alpha must lie in (0, 0.5]");
  if (state.policy == BoundaryPolicy::pinned_exact && !state.pin) throw UsageError("pinned boundary needs exact data");
  if (dt <= 0.0) {
    const double h = min_spacing(state.sample, scheme.order);
    dt = scheme.alpha * h * h;
  }
  const auto band = state.policy == BoundaryPolicy::none ? std::vector<unsigned char>(state.sample.positions.nodes(), 0)
                                                         : pin_band(state.sample.domain, state.pin_width);
  const auto& y0 = state.sample.positions;
  const std::size_t total = y0.data().size();
  auto stage = [&](const GridField& base, const GridField& k, double w) {
    GridField out = base;
    for (std::size_t i = 0; i < total; ++i) out.data()[i] += w * k.data()[i];
    return ImmersionSample(state.sample.domain, state.sample.signature, std::move(out), state.sample.name);
  };
  GridField next = y0;
  const double t = state.t;
  if (scheme.kind == SchemeKind::explicit_euler) {
    const GridField k1 = velocity(state.sample, state, t, scheme.order, band);
    for (std::size_t i = 0; i < total; ++i) next.data()[i] += dt * k1.data()[i];
  } else {
    const GridField k1 = velocity(state.sample, state, t, scheme.order, band);
    const GridField k2 = velocity(stage(y0, k1, 0.5 * dt), state, t + 0.5 * dt, scheme.order, band);
    const GridField k3 = velocity(stage(y0, k2, 0.5 * dt), state, t + 0.5 * dt, scheme.order, band);
    const GridField k4 = velocity(stage(y0, k3, dt), state, t + dt, scheme.order, band);
    for (std::size_t i = 0; i < total; ++i) {
      next.data()[i] += dt / 6.0 * (k1.data()[i] + 2.0 * k2.data()[i] + 2.0 * k3.data()[i] + k4.data()[i]);
    }
  }
  FlowState out = state;
  out.t = t + dt;
  if (state.policy == BoundaryPolicy::pinned_exact) {
    const double s = scale_factor(state.pin->k, state.pin->m, out.t);
    const int n = state.sample.signature.dim();
    for (std::size_t k = 0; k < next.nodes(); ++k) {
      if (!band[k]) continue;
      for (int c = 0; c < n; ++c) next(k, sz(c)) = s * state.pin->initial(k, sz(c));
    }
  }
  check_finite(next);
  out.sample = ImmersionSample(state.sample.domain, state.sample.signature, std::move(next), state.sample.name);
  return out;
}

Trajectory run_flow(const FlowState& initial, const StepScheme& scheme, double t_end,
                    const std::vector<double>& snapshot_times, const Guards& guards) {
  if (!(t_end > initial.t)) throw UsageError("run_flow: t_end must exceed the current time");
  Trajectory traj;
  traj.snapshots.push_back({initial.t, initial.sample});

  std::vector<double> stops;
  for (double ts : snapshot_times)
    if (ts > initial.t && ts < t_end) stops.push_back(ts);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  stops.push_back(t_end);

  // Extinction guard for shrinking hyperquadric data.
  std::optional<double> t_guard;
  try {
    const double k = hyperquadric_level(initial.sample);
    if (k > 0.0) t_guard = guards.extinction_fraction * k / (2.0 * initial.sample.dim());
  } catch (const UsageError&) {
  }

  const mesh::NodeMask interior =
      mesh::interior_mask(initial.sample.domain, 4 * mesh::stencil_half_width(scheme.order));

  FlowState state = initial;
  std::size_t next_stop = 0;
  auto& rep = traj.report;
  while (next_stop < stops.size()) {
    if (rep.steps >= guards.max_steps) {
      rep.guard_tripped = true;
      rep.reason = "step budget exhausted";
      break;
    }
    double target = stops[next_stop];
    bool guard_stop = false;
    if (t_guard && *t_guard <= target) {
      target = *t_guard;
      guard_stop = true;
    }
    if (state.t >= target) {
      rep.guard_tripped = true;
      rep.reason = "extinction guard at t = " + std::to_string(target);
      break;
    }
    const double h = min_spacing(state.sample, scheme.order);
    double dt = scheme.alpha * h * h;
    bool lands = false;
    if (state.t + dt >= target) {
      dt = target - state.t;
      lands = true;
    }
    std::optional<FlowState> next;
    try {
      next.emplace(mcf_step(state, scheme, dt));
    } catch (const DegenerateMetricError& e) {
      rep.halted = true;
      rep.reason = std::string("metric degenerated: ") + e.what();
      break;
    }
    ++rep.steps;
    if (lands) next->t = target;
    state = std::move(*next);

    double min_norm = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < state.sample.positions.nodes(); ++k) {
      if (!interior[k]) continue;
      min_norm = std::min(min_norm, std::abs(ambient::norm2(state.sample.signature, state.sample.positions.value(k, 0))));
    }
    if (t_guard && min_norm < guards.min_abs_norm2) {
      rep.guard_tripped = true;
      rep.reason = "min |<F,F>| fell below " + std::to_string(guards.min_abs_norm2);
      break;
    }
    if (lands) {
      if (guard_stop) {
        rep.guard_tripped = true;
        rep.reason = "extinction guard at t = " + std::to_string(target);
        break;
      }
      traj.snapshots.push_back({state.t, state.sample});
      ++next_stop;
    }
  }
  rep.t_final = state.t;
  if (traj.snapshots.back().t != state.t) traj.snapshots.push_back({state.t, state.sample});
  return traj;
}

std::vector<NormEvolutionRow> norm_evolution_check(const Trajectory& traj, int mask_width) {
  if (traj.snapshots.empty()) return {};
  const auto& first = traj.snapshots.front().sample;
  const double k = hyperquadric_level(first);
  const int m = first.dim();
  const auto mask = mesh::interior_mask(first.domain, mask_width >= 0 ? mask_width : 8);
  std::vector<NormEvolutionRow> rows;
  for (const auto& snap : traj.snapshots) {
    NormEvolutionRow row;
    row.t = snap.t;
    row.expected = k - 2.0 * m * snap.t;
    std::vector<double> err(snap.sample.positions.nodes());
    for (std::size_t i = 0; i < err.size(); ++i) {
      err[i] = std::abs(ambient::norm2(snap.sample.signature, snap.sample.positions.value(i, 0)) - row.expected);
    }
    const auto st = mesh::masked_stats(err, mask);
    row.sup_error = st.sup;
    row.mean_error = st.mean;
    rows.push_back(row);
  }
  return rows;
}

std::vector<HomothetyRow> homothety_detect(const Trajectory& traj, int mask_width) {
  if (traj.snapshots.empty()) return {};
  const auto& f0 = traj.snapshots.front().sample.positions;
  const auto mask = mesh::interior_mask(f0.domain(), mask_width >= 0 ? mask_width : 8);
  const int n = f0.width();
  std::vector<HomothetyRow> rows;
  for (const auto& snap : traj.snapshots) {
    const auto& ft = snap.sample.positions;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < ft.nodes(); ++k) {
      if (!mask[k]) continue;
      for (int c = 0; c < n; ++c) {
        num += ft(k, sz(c)) * f0(k, sz(c));
        den += ft(k, sz(c)) * ft(k, sz(c));
      }
    }
    HomothetyRow row;
    row.t = snap.t;
    row.c_fit = den > 0.0 ? num / den : 1.0;
    std::vector<double> diff(sz(n));
    for (std::size_t k = 0; k < ft.nodes(); ++k) {
      if (!mask[k]) continue;
      for (int c = 0; c < n; ++c) diff[sz(c)] = row.c_fit * ft(k, sz(c)) - f0(k, sz(c));
      row.residual = std::max(row.residual, ambient::euclidean_norm(diff));
    }
    rows.push_back(row);
  }
  return rows;
}

LightconePoint lightcone_graph(const std::vector<double>& x, double t, int n) {
  if (n < 2) throw UsageError("lightcone_graph: n must be at least 2");
  if (x.size() != sz(n - 1)) throw UsageError("lightcone_graph: x must have n - 1 components");
  if (!(t >= 0.0)) throw DomainError("lightcone_graph: t must be non-negative");
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  const double delta = std::sqrt(r2 + 2.0 * (n - 1) * t);
  std::vector<double> comp;
  comp.reserve(sz(n));
  comp.push_back(delta);
  comp.insert(comp.end(), x.begin(), x.end());
  return {delta, AmbientVec(ambient::Signature(1, n), std::move(comp))};
}

void export_trajectory(const std::string& dir, const Trajectory& traj) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::optional<std::vector<NormEvolutionRow>> norms;
  try {
    norms = norm_evolution_check(traj);
  } catch (const UsageError&) {
  }
  const auto homs = homothety_detect(traj);
  nlohmann::ordered_json manifest;
  manifest["report"] = {{"steps", traj.report.steps},
                        {"t_final", traj.report.t_final},
                        {"guard_tripped", traj.report.guard_tripped},
                        {"halted", traj.report.halted},
                        {"reason", traj.report.reason}};
  manifest["snapshots"] = nlohmann::ordered_json::array();
  const int n = traj.snapshots.empty() ? 0 : traj.snapshots.front().sample.signature.dim();
  std::vector<std::string> names;
  for (int c = 0; c < n; ++c) names.push_back("F" + std::to_string(c));
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    std::ostringstream file;
    file << "snapshot_" << std::setw(4) << std::setfill('0') << i << ".csv";
    std::ofstream out(fs::path(dir) / file.str());
    if (!out) throw Error("cannot write " + (fs::path(dir) / file.str()).string());
    mesh::write_csv(out, traj.snapshots[i].sample.positions, names);
    nlohmann::ordered_json entry = {{"t", traj.snapshots[i].t}, {"file", file.str()}};
    if (norms) {
      entry["k_minus_2mt"] = (*norms)[i].expected;
      entry["sup_norm_error"] = (*norms)[i].sup_error;
    }
    entry["c_fit"] = homs[i].c_fit;
    entry["homothety_residual"] = homs[i].residual;
    manifest["snapshots"].push_back(entry);
  }
  std::ofstream mf(fs::path(dir) / "manifest.json");
  mf << manifest.dump(2) << "\n";
}

}  // namespace pseudomcf::flow
