#ifndef PSEUDOMCF_ALCURVE_HPP_
#define PSEUDOMCF_ALCURVE_HPP_

// Self-shrinking plane curves: gamma' = T, T' = kappa N with N = rot90(T) and
// kappa = -<gamma, N>, integrated by arc length.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pseudomcf::alcurve {

using Vec2 = std::array<double, 2>;

struct CurveState {
  Vec2 gamma{0.0, 0.0};
  Vec2 tangent{1.0, 0.0};
  double angle = 0.0;  // accumulated tangent turning
  double s = 0.0;

  Vec2 normal() const { return {-tangent[1], tangent[0]}; }
  double kappa() const;
};

// gamma0 = (kappa0, 0), T0 = (0, 1): the point of extremal curvature kappa0.
CurveState extremal_start(double kappa0);

double conserved_quantity(const CurveState& state);

// One rk4 step of length ds followed by renormalization of T.
CurveState rk4_step(const CurveState& state, double ds);

enum class StopRule { periods, turning, arc_length };

struct ShootOptions {
  double ds = 1e-3;
  std::size_t max_steps = 2'000'000;
  StopRule stop = StopRule::periods;
  double target = 1.0;  // periods, turns (multiples of 2 pi) or arc length
  double escape_radius = 1e3;
  bool keep_samples = true;
};

struct ClosureReport {
  double position_gap = 0.0;  // |gamma(end) - gamma(0)|_E
  double angle_gap = 0.0;     // turning mod 2 pi, folded to [0, pi]
  double winding = 0.0;       // total turning / 2 pi
  std::size_t periods = 0;    // completed curvature oscillations
  std::vector<double> period_lengths;
  std::vector<double> period_turning;  // turning over each completed period
};

struct ShootResult {
  std::vector<CurveState> samples;
  CurveState final_state;
  ClosureReport closure;
  std::size_t steps = 0;
  bool reached_target = false;
  bool inflection = false;
  bool diverged = false;
  double max_tangent_defect = 0.0;  // max ||T| - 1| before renormalization
  double max_kappa_consistency = 0.0;
  double max_conserved_drift = 0.0;  // max |E(s) - E(0)| / |E(0)|
  std::string message;
};

// Curvature periods are counted between extrema of |gamma|, so the start is
// expected at an extremum (<gamma0, T0> = 0). A circle has no oscillation and
// is stopped by turning instead when StopRule::periods is requested.
ShootResult shoot(const Vec2& gamma0, const Vec2& tangent0, const ShootOptions& opt = {});

struct IntrinsicState {
  double kappa = 1.0;
  double kappa_s = 0.0;
};

// kappa_ss = kappa_s^2 / kappa + kappa - kappa^3; DomainError when kappa = 0.
double intrinsic_acceleration(double kappa, double kappa_s);
IntrinsicState intrinsic_step(const IntrinsicState& state, double ds);

struct ClosedCurve {
  double kappa0 = 1.0;
  int turns = 1;    // p
  int periods = 1;  // q
  double period_length = 0.0;
  double total_length = 0.0;
  double closure_gap = 0.0;
  double ds = 1e-3;

  bool is_circle() const { return periods == 1 && turns == 1 && kappa0 == 1.0; }
  // Equally spaced arc-length samples over the full closed curve; each sample
  // is reached by rk4 substeps of size <= ds.
  std::vector<CurveState> resample(int count) const;
};

struct FindOptions {
  double ds = 1e-3;
  double tolerance = 1e-4;  // closure gap
  int max_iterations = 200;
  double ratio_tolerance = 1e-13;
};

struct FindResult {
  bool found = false;
  std::optional<ClosedCurve> curve;
  int iterations = 0;
  double lo = 0.0;
  double hi = 0.0;
  double f_lo = 0.0;
  double f_hi = 0.0;
  std::string message;
};

// Turning per curvature period divided by 2 pi, for the curve through the
// extremal start with curvature kappa0.
double period_ratio(double kappa0, double ds = 1e-3);

// Searches kappa0 in [lo, hi] for period_ratio = p / q by regula falsi
// (Illinois variant), then closes the curve over q periods.
FindResult find_closed(double lo, double hi, int p, int q, const FindOptions& opt = {});

// s, x, y, kappa, conserved quantity.
void write_curve_csv(std::ostream& out, const std::vector<CurveState>& samples);

}  // namespace pseudomcf::alcurve

#endif  // PSEUDOMCF_ALCURVE_HPP_
