#ifndef PSEUDOMCF_FLOW_HPP_
#define PSEUDOMCF_FLOW_HPP_

// Explicit time integration of dF/dt = H and the closed-form hyperquadric
// solutions it is compared against.

#include <optional>
#include <string>
#include <vector>

#include "pseudomcf/geometry.hpp"

namespace pseudomcf::flow {

using ambient::AmbientVec;
using geometry::ImmersionSample;
using mesh::GridField;

enum class SchemeKind { explicit_euler, rk4 };

std::string to_string(SchemeKind kind);
SchemeKind parse_scheme(const std::string& name);

struct StepScheme {
  SchemeKind kind = SchemeKind::rk4;
  double alpha = 0.1;  // dt = alpha * h_min^2, alpha in (0, 0.5]
  int order = 4;
};

enum class BoundaryPolicy { none, pinned_exact, frozen };

// Closed-form data used to pin patch boundaries.
struct ExactPin {
  GridField initial;
  double k = 0.0;
  int m = 0;
};

struct FlowState {
  double t = 0.0;
  ImmersionSample sample;
  BoundaryPolicy policy = BoundaryPolicy::none;
  std::optional<ExactPin> pin;
  int pin_width = 2;
};

// Fully periodic samples get BoundaryPolicy::none; patches are pinned to the
// exact solution when the data lies on a hyperquadric with k != 0, frozen otherwise.
FlowState initial_state(const ImmersionSample& sample);

// Smallest physical grid spacing sqrt(g_aa) h_a over all nodes.
double min_spacing(const ImmersionSample& sample, int order = 4);

// Advances by dt (or the policy step alpha * h_min^2 when dt <= 0).
// DegenerateMetricError propagates when the metric degenerates.
FlowState mcf_step(const FlowState& state, const StepScheme& scheme, double dt = 0.0);

struct Guards {
  double min_abs_norm2 = 1e-8;    // halt when min interior |<F,F>| drops below
  double extinction_fraction = 0.95;
  std::size_t max_steps = 10'000'000;
};

struct Snapshot {
  double t = 0.0;
  ImmersionSample sample;
};

struct FlowReport {
  std::size_t steps = 0;
  double t_final = 0.0;
  bool guard_tripped = false;
  bool halted = false;  // metric degeneracy
  std::string reason;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;  // t = t0 first
  FlowReport report;
};

// Integrates to t_end, landing exactly on each requested snapshot time.
Trajectory run_flow(const FlowState& state, const StepScheme& scheme, double t_end,
                    const std::vector<double>& snapshot_times = {}, const Guards& guards = {});

// <F,F> of hyperquadric data; UsageError if not constant to rel_tol.
double hyperquadric_level(const ImmersionSample& sample, double rel_tol = 1e-8);

// Closed-form homothety factor c(t) = sqrt(k / (k - 2 m t)).
double homothety_factor(double k, int m, double t);

// c(t)^{-1} F0. DomainError for k = 0 (light cone) and for t >= k / 2m when k > 0.
ImmersionSample exact_hyperquadric_solution(const ImmersionSample& initial, double t);

struct NormEvolutionRow {
  double t = 0.0;
  double expected = 0.0;  // k - 2 m t
  double sup_error = 0.0;
  double mean_error = 0.0;
};
// Interior sup of |<F,F> - (k - 2mt)| per snapshot; k from the first snapshot.
std::vector<NormEvolutionRow> norm_evolution_check(const Trajectory& traj, int mask_width = -1);

struct HomothetyRow {
  double t = 0.0;
  double c_fit = 1.0;
  double residual = 0.0;  // interior sup |c F(t) - F(0)|_E
};
std::vector<HomothetyRow> homothety_detect(const Trajectory& traj, int mask_width = -1);

struct LightconePoint {
  double delta = 0.0;
  AmbientVec point;  // (delta, x) in R^{1,n}
};
// x has n - 1 components; DomainError for t < 0.
LightconePoint lightcone_graph(const std::vector<double>& x, double t, int n);

// One CSV per snapshot plus manifest.json in dir.
void export_trajectory(const std::string& dir, const Trajectory& traj);

}  // namespace pseudomcf::flow

#endif  // PSEUDOMCF_FLOW_HPP_
