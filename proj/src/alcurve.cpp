#include "pseudomcf/alcurve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <locale>
#include <ostream>
#include <sstream>

#include "pseudomcf/errors.hpp"

namespace pseudomcf::alcurve {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

struct Deriv {
  Vec2 dgamma;
  Vec2 dtangent;
  double dangle;
};

Deriv rhs(const Vec2& g, const Vec2& t) {
  const Vec2 n{-t[1], t[0]};
  const double k = -dot(g, n);
  return {t, {k * n[0], k * n[1]}, k};
}

double radial_speed(const CurveState& s) { return dot(s.gamma, s.tangent); }

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

// Finds sigma in (0, ds] with event(rk4_step(from, sigma)) = 0, given a sign
// change between sigma = 0 and sigma = ds.
template <class Event>
CurveState refine(const CurveState& from, double ds, Event event) {
  double a = 0.0, b = ds;
  double fa = event(from);
  CurveState sb = rk4_step(from, b);
  double fb = event(sb);
  CurveState best = sb;
  for (int it = 0; it < 60; ++it) {
    if (fb == 0.0) return sb;
    const double c = (fa != fb) ? b - fb * (b - a) / (fb - fa) : 0.5 * (a + b);
    const double cc = (c <= std::min(a, b) || c >= std::max(a, b)) ? 0.5 * (a + b) : c;
    const CurveState sc = rk4_step(from, cc);
    const double fc = event(sc);
    best = sc;
    if (fc == 0.0 || std::abs(b - a) < 1e-16 * ds) break;
    if (sign_of(fc) == sign_of(fa)) {
      a = cc;
      fa = fc;
      fb *= 0.5;
    } else {
      b = cc;
      fb = fc;
      fa *= 0.5;
    }
    if (std::abs(fc) < 1e-17) break;
  }
  return best;
}

}  // namespace

double CurveState::kappa() const { return -dot(gamma, normal()); }

CurveState extremal_start(double kappa0) {
  CurveState s;
  s.gamma = {kappa0, 0.0};
  s.tangent = {0.0, 1.0};
  return s;
}

double conserved_quantity(const CurveState& state) {
  return state.kappa() * std::exp(-0.5 * dot(state.gamma, state.gamma));
}

namespace {

CurveState rk4_raw(const CurveState& st, double ds) {
  const Vec2& g = st.gamma;
  const Vec2& t = st.tangent;
  auto shift = [](const Vec2& v, const Vec2& d, double h) { return Vec2{v[0] + h * d[0], v[1] + h * d[1]}; };
  const Deriv k1 = rhs(g, t);
  const Deriv k2 = rhs(shift(g, k1.dgamma, 0.5 * ds), shift(t, k1.dtangent, 0.5 * ds));
  const Deriv k3 = rhs(shift(g, k2.dgamma, 0.5 * ds), shift(t, k2.dtangent, 0.5 * ds));
  const Deriv k4 = rhs(shift(g, k3.dgamma, ds), shift(t, k3.dtangent, ds));
  CurveState out;
  for (int c = 0; c < 2; ++c) {
    out.gamma[c] = g[c] + ds / 6.0 * (k1.dgamma[c] + 2.0 * k2.dgamma[c] + 2.0 * k3.dgamma[c] + k4.dgamma[c]);
    out.tangent[c] =
        t[c] + ds / 6.0 * (k1.dtangent[c] + 2.0 * k2.dtangent[c] + 2.0 * k3.dtangent[c] + k4.dtangent[c]);
  }
  out.angle = st.angle + ds / 6.0 * (k1.dangle + 2.0 * k2.dangle + 2.0 * k3.dangle + k4.dangle);
  out.s = st.s + ds;
  return out;
}

void renormalize(CurveState& s) {
  const double len = std::hypot(s.tangent[0], s.tangent[1]);
  s.tangent = {s.tangent[0] / len, s.tangent[1] / len};
}

}  // namespace

CurveState rk4_step(const CurveState& st, double ds) {
  CurveState out = rk4_raw(st, ds);
  renormalize(out);
  return out;
}

ShootResult shoot(const Vec2& gamma0, const Vec2& tangent0, const ShootOptions& opt) {
  if (!(opt.ds > 0.0)) throw UsageError("shoot: ds must be positive");
  if (!(opt.target > 0.0)) throw UsageError("shoot: target must be positive");
  const double tlen = std::hypot(tangent0[0], tangent0[1]);
  if (!(tlen > 0.0) || !std::isfinite(tlen)) throw UsageError("shoot: tangent must be a finite nonzero vector");
  CurveState state;
  state.gamma = gamma0;
  state.tangent = {tangent0[0] / tlen, tangent0[1] / tlen};
  if (!std::isfinite(state.kappa())) throw UsageError("shoot: initial curvature is not finite");

  ShootResult res;
  const CurveState start = state;
  const double e0 = conserved_quantity(start);
  StopRule stop = opt.stop;
  const double k0 = start.kappa();
  // Constant curvature: nothing oscillates, count full turns instead.
  if (stop == StopRule::periods && std::abs(radial_speed(start)) == 0.0 && std::abs(1.0 - k0 * k0) <= 1e-12) {
    stop = StopRule::turning;
  }
  if (opt.keep_samples) res.samples.push_back(state);

  int u_sign = sign_of(radial_speed(state));
  int crossings = 0;
  CurveState period_start = state;
  const int k_sign = sign_of(k0);

  auto record = [&](const CurveState& s) {
    res.max_kappa_consistency = std::max(res.max_kappa_consistency, std::abs(s.kappa() + dot(s.gamma, s.normal())));
    if (e0 != 0.0) res.max_conserved_drift = std::max(res.max_conserved_drift, std::abs(conserved_quantity(s) - e0) / std::abs(e0));
    if (sign_of(s.kappa()) != k_sign) res.inflection = true;
    if (opt.keep_samples) res.samples.push_back(s);
  };

  while (res.steps < opt.max_steps) {
    double ds = opt.ds;
    if (stop == StopRule::arc_length) {
      const double left = opt.target - (state.s - start.s);
      if (left <= 0.0) {
        res.reached_target = true;
        break;
      }
      ds = std::min(ds, left);
    }
    CurveState next = rk4_raw(state, ds);
    res.max_tangent_defect =
        std::max(res.max_tangent_defect, std::abs(std::hypot(next.tangent[0], next.tangent[1]) - 1.0));
    renormalize(next);
    ++res.steps;

    if (stop == StopRule::turning) {
      const double goal = kTwoPi * opt.target;
      const double before = std::abs(state.angle - start.angle) - goal;
      const double after = std::abs(next.angle - start.angle) - goal;
      if (before < 0.0 && after >= 0.0) {
        next = refine(state, ds, [&](const CurveState& s) { return std::abs(s.angle - start.angle) - goal; });
        record(next);
        state = next;
        res.reached_target = true;
        break;
      }
    }

    const int ns = sign_of(radial_speed(next));
    if (ns != 0 && u_sign != 0 && ns != u_sign) {
      ++crossings;
      if (crossings % 2 == 0) {
        const CurveState end = refine(state, ds, radial_speed);
        res.closure.period_lengths.push_back(end.s - period_start.s);
        res.closure.period_turning.push_back(end.angle - period_start.angle);
        ++res.closure.periods;
        period_start = end;
        if (stop == StopRule::periods && static_cast<double>(res.closure.periods) >= opt.target) {
          record(end);
          state = end;
          res.reached_target = true;
          break;
        }
      }
    }
    if (ns != 0) u_sign = ns;
    if (u_sign == 0) u_sign = ns;

    record(next);
    state = next;
    if (std::hypot(state.gamma[0], state.gamma[1]) > opt.escape_radius || !std::isfinite(state.gamma[0])) {
      res.diverged = true;
      res.message = "trajectory escaped radius " + std::to_string(opt.escape_radius);
      break;
    }
    if (stop == StopRule::arc_length && state.s - start.s >= opt.target) {
      res.reached_target = true;
      break;
    }
  }
  if (!res.reached_target && res.message.empty()) {
    res.message = "stopped after max_steps without reaching the target (non-closing or slow trajectory)";
  }
  if (res.inflection && res.message.empty()) res.message = "curvature changed sign";

  res.final_state = state;
  auto& cl = res.closure;
  cl.position_gap = std::hypot(state.gamma[0] - start.gamma[0], state.gamma[1] - start.gamma[1]);
  const double turn = state.angle - start.angle;
  double folded = std::fmod(std::abs(turn), kTwoPi);
  cl.angle_gap = std::min(folded, kTwoPi - folded);
  cl.winding = turn / kTwoPi;
  return res;
}

double intrinsic_acceleration(double kappa, double kappa_s) {
  if (kappa == 0.0) throw DomainError("intrinsic curvature ODE is singular at kappa = 0");
  return kappa_s * kappa_s / kappa + kappa - kappa * kappa * kappa;
}

IntrinsicState intrinsic_step(const IntrinsicState& st, double ds) {
  auto f = [](double k, double ks) { return std::array<double, 2>{ks, intrinsic_acceleration(k, ks)}; };
  const auto k1 = f(st.kappa, st.kappa_s);
  const auto k2 = f(st.kappa + 0.5 * ds * k1[0], st.kappa_s + 0.5 * ds * k1[1]);
  const auto k3 = f(st.kappa + 0.5 * ds * k2[0], st.kappa_s + 0.5 * ds * k2[1]);
  const auto k4 = f(st.kappa + ds * k3[0], st.kappa_s + ds * k3[1]);
  return {st.kappa + ds / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
          st.kappa_s + ds / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

std::vector<CurveState> ClosedCurve::resample(int count) const {
  if (count < 8) throw UsageError("resample: need at least 8 samples");
  const double h = total_length / count;
  const int sub = std::max(1, static_cast<int>(std::ceil(h / ds - 1e-12)));
  const double step = h / sub;
  std::vector<CurveState> out;
  out.reserve(static_cast<std::size_t>(count));
  CurveState st = extremal_start(kappa0);
  for (int j = 0; j < count; ++j) {
    CurveState rec = st;
    rec.s = j * h;
    out.push_back(rec);
    for (int r = 0; r < sub; ++r) st = rk4_step(st, step);
  }
  return out;
}

double period_ratio(double kappa0, double ds) {
  if (!(kappa0 > 0.0) || std::abs(1.0 - kappa0 * kappa0) <= 1e-12) {
    throw DomainError("period_ratio: the curvature does not oscillate for kappa0 = " + std::to_string(kappa0));
  }
  ShootOptions opt;
  opt.ds = ds;
  opt.stop = StopRule::periods;
  opt.target = 1.0;
  opt.keep_samples = false;
  const auto res = shoot(extremal_start(kappa0).gamma, extremal_start(kappa0).tangent, opt);
  if (!res.reached_target || res.closure.period_turning.empty()) {
    throw DomainError("period_ratio: no complete curvature period for kappa0 = " + std::to_string(kappa0) +
                      " (" + res.message + ")");
  }
  return std::abs(res.closure.period_turning.front()) / kTwoPi;
}

namespace {

ClosedCurve close_curve(double kappa0, int p, int q, double ds) {
  ShootOptions opt;
  opt.ds = ds;
  opt.keep_samples = false;
  const CurveState st = extremal_start(kappa0);
  ClosedCurve c;
  c.kappa0 = kappa0;
  c.turns = p;
  c.periods = q;
  c.ds = ds;
  if (std::abs(1.0 - kappa0) == 0.0) {
    opt.stop = StopRule::turning;
    opt.target = 1.0;
  } else {
    opt.stop = StopRule::periods;
    opt.target = q;
  }
  const auto res = shoot(st.gamma, st.tangent, opt);
  c.total_length = res.final_state.s;
  c.period_length = c.total_length / q;
  c.closure_gap = std::max(res.closure.position_gap, res.closure.angle_gap);
  return c;
}

}  // namespace

FindResult find_closed(double lo, double hi, int p, int q, const FindOptions& opt) {
  if (p < 1 || q < 1) throw UsageError("find_closed: winding target must be a positive ratio p/q");
  if (!(lo > 0.0) || !(hi > lo)) throw UsageError("find_closed: bracket must satisfy 0 < lo < hi");
  FindResult fr;
  fr.lo = lo;
  fr.hi = hi;
  if (lo <= 1.0 && 1.0 <= hi) {
    const ClosedCurve c = close_curve(1.0, 1, 1, opt.ds);
    fr.iterations = 1;
    fr.found = c.closure_gap <= opt.tolerance;
    fr.curve = c;
    fr.message = "bracket contains kappa0 = 1: circle";
    return fr;
  }
  const double target = static_cast<double>(p) / q;
  auto f = [&](double k) {
    ++fr.iterations;
    return period_ratio(k, opt.ds) - target;
  };
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  fr.f_lo = fa;
  fr.f_hi = fb;
  if (sign_of(fa) == sign_of(fb) && fa != 0.0) {
    fr.message = "no sign change of the period ratio defect on [" + std::to_string(lo) + ", " + std::to_string(hi) +
                 "]: target " + std::to_string(p) + "/" + std::to_string(q) + " not bracketed";
    return fr;
  }
  double root = fa == 0.0 ? a : b;
  int side = 0;
  while (fa != 0.0 && fb != 0.0 && fr.iterations < opt.max_iterations) {
    const double c = (a * fb - b * fa) / (fb - fa);
    const double fc = f(c);
    root = c;
    if (std::abs(fc) <= opt.ratio_tolerance || std::abs(b - a) <= 1e-15 * std::abs(c)) break;
    if (sign_of(fc) == sign_of(fb)) {
      b = c;
      fb = fc;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = c;
      fa = fc;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
  }
  ClosedCurve c = close_curve(root, p, q, opt.ds);
  fr.curve = c;
  fr.found = c.closure_gap <= opt.tolerance;
  fr.message = fr.found ? "closed" : "closure gap " + std::to_string(c.closure_gap) + " above tolerance";
  if (fr.iterations >= opt.max_iterations && !fr.found) fr.message += " (iteration budget exhausted)";
  return fr;
}

void write_curve_csv(std::ostream& out, const std::vector<CurveState>& samples) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(std::numeric_limits<double>::max_digits10);
  os << "s,x,y,kappa,conserved\n";
  for (const auto& s : samples) {
    os << s.s << ',' << s.gamma[0] << ',' << s.gamma[1] << ',' << s.kappa() << ',' << conserved_quantity(s) << '\n';
  }
  out << os.str();
}

}  // namespace pseudomcf::alcurve
