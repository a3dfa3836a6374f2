#include "pseudomcf/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "pseudomcf/errors.hpp"

namespace pseudomcf::catalog {

namespace {

using mesh::AxisSpec;
using mesh::ParamDomain;

constexpr double kPi = std::numbers::pi;

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

AxisSpec periodic_axis(int count) { return {0.0, 2.0 * kPi, count, true}; }

std::vector<int> positive_axes(const Signature& sig, int needed, const std::string& what) {
  if (sig.positive_count() < needed) {
    throw UsageError(what + " needs " + std::to_string(needed) + " positive axes, " + sig.to_string() + " has " +
                     std::to_string(sig.positive_count()));
  }
  std::vector<int> axes;
  for (int a = sig.index(); a < sig.index() + needed; ++a) axes.push_back(a);
  return axes;
}

}  // namespace

ImmersionSample sphere(int m, const Signature& sig, int resolution, double polar_margin) {
  const auto axes = positive_axes(sig, m + 1, "sphere");
  const int n = sig.dim();
  if (m == 1) {
    ParamDomain dom({periodic_axis(resolution)});
    return geometry::sample_chart(
        dom, sig,
        [&](std::span<const double> x) {
          std::vector<double> p(sz(n), 0.0);
          p[sz(axes[0])] = std::cos(x[0]);
          p[sz(axes[1])] = std::sin(x[0]);
          return p;
        },
        "circle");
  }
  if (m == 2) {
    if (!(polar_margin > 0.0 && polar_margin < 0.5 * kPi)) throw UsageError("sphere: polar margin must lie in (0, pi/2)");
    ParamDomain dom({{polar_margin, kPi - polar_margin, std::max(resolution / 2, 8), false}, periodic_axis(resolution)});
    const double r = std::sqrt(2.0);
    return geometry::sample_chart(
        dom, sig,
        [&](std::span<const double> x) {
          std::vector<double> p(sz(n), 0.0);
          p[sz(axes[0])] = r * std::sin(x[0]) * std::cos(x[1]);
          p[sz(axes[1])] = r * std::sin(x[0]) * std::sin(x[1]);
          p[sz(axes[2])] = r * std::cos(x[0]);
          return p;
        },
        "sphere_m2");
  }
  throw UsageError("sphere: only m = 1 and m = 2 are provided, got m = " + std::to_string(m));
}

ImmersionSample circle(int resolution) { return sphere(1, Signature(0, 2), resolution); }

ImmersionSample clifford_torus(int resolution) {
  ParamDomain dom({periodic_axis(resolution), periodic_axis(resolution)});
  return geometry::sample_chart(
      dom, Signature(0, 4),
      [](std::span<const double> x) {
        return std::vector<double>{std::cos(x[0]), std::sin(x[0]), std::cos(x[1]), std::sin(x[1])};
      },
      "clifford_torus");
}

ImmersionSample hyperbolic_expander(double radius, int resolution) {
  if (!(radius > 0.0)) throw UsageError("hyperbolic_expander: patch radius must be positive");
  ParamDomain dom({{0.25 * radius, radius, resolution, false}, periodic_axis(resolution)});
  return geometry::sample_chart(
      dom, Signature(1, 3),
      [](std::span<const double> x) {
        return std::vector<double>{std::cosh(x[0]), std::sinh(x[0]) * std::cos(x[1]), std::sinh(x[0]) * std::sin(x[1])};
      },
      "hyperbolic_expander");
}

ImmersionSample cylinder_product(const ImmersionSample& core, const std::vector<int>& flat_axes, double half_length,
                                 int count) {
  const auto& sig = core.signature;
  const int n = sig.dim();
  if (flat_axes.empty()) throw UsageError("cylinder_product: need at least one flat axis");
  if (!(half_length > 0.0)) throw UsageError("cylinder_product: half length must be positive");
  for (std::size_t i = 0; i < flat_axes.size(); ++i) {
    const int a = flat_axes[i];
    if (a < 0 || a >= n) throw UsageError("cylinder_product: flat axis " + std::to_string(a) + " out of range");
    if (sig.is_timelike_axis(a)) {
      throw UsageError("cylinder_product: flat axis " + std::to_string(a) +
                       " is timelike; the product metric would not be positive definite");
    }
    if (std::count(flat_axes.begin(), flat_axes.end(), a) > 1) {
      throw UsageError("cylinder_product: flat axis " + std::to_string(a) + " repeated");
    }
    for (std::size_t k = 0; k < core.positions.nodes(); ++k) {
      if (core.positions(k, sz(a)) != 0.0) {
        throw UsageError("cylinder_product: flat axis " + std::to_string(a) + " collides with the core immersion");
      }
    }
  }
  std::vector<AxisSpec> axes = core.domain.axes();
  for (std::size_t i = 0; i < flat_axes.size(); ++i) axes.push_back({-half_length, half_length, count, false});
  ParamDomain dom(axes);
  mesh::GridField pos(dom, 0, n);
  const int mc = core.domain.dim();
  for (std::size_t k = 0; k < dom.node_count(); ++k) {
    const auto idx = dom.multi_index(k);
    std::size_t core_node = 0;
    for (int a = 0; a < mc; ++a) core_node += core.domain.stride(a) * sz(idx[sz(a)]);
    auto dst = pos.node(k);
    auto src = core.positions.node(core_node);
    std::copy(src.begin(), src.end(), dst.begin());
    for (std::size_t i = 0; i < flat_axes.size(); ++i) {
      dst[sz(flat_axes[i])] = dom.coordinate(mc + static_cast<int>(i), idx[sz(mc) + i]);
    }
  }
  return ImmersionSample(dom, sig, std::move(pos), core.name + "_x_R" + std::to_string(flat_axes.size()));
}

ImmersionSample al_cylinder(const alcurve::ClosedCurve& curve, int resolution, int d, const Signature& sig,
                            double half_length, int count, double closure_tolerance) {
  if (!(curve.closure_gap <= closure_tolerance)) {
    throw UsageError("al_cylinder: curve is not closed (gap " + std::to_string(curve.closure_gap) + ")");
  }
  if (d < 1) throw UsageError("al_cylinder: need d >= 1");
  const auto axes = positive_axes(sig, 2 + d, "al_cylinder");
  const auto samples = curve.resample(resolution);
  ParamDomain dom({{0.0, curve.total_length, resolution, true}});
  mesh::GridField pos(dom, 0, sig.dim());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    pos(k, sz(axes[0])) = samples[k].gamma[0];
    pos(k, sz(axes[1])) = samples[k].gamma[1];
  }
  ImmersionSample core(dom, sig, std::move(pos), curve.is_circle() ? "circle" : "al_curve");
  std::vector<int> flat(axes.begin() + 2, axes.end());
  auto out = cylinder_product(core, flat, half_length, count);
  out.name = "al_cylinder";
  return out;
}

ImmersionSample affine_plane(int count) {
  ParamDomain dom({{-2.0, 2.0, count, false}, {-2.0, 2.0, count, false}});
  return geometry::sample_chart(
      dom, Signature(0, 3), [](std::span<const double> x) { return std::vector<double>{x[0], x[1], 0.0}; },
      "affine_plane");
}

ImmersionSample twisted_torus(int resolution, double eps) {
  ParamDomain dom({periodic_axis(resolution), periodic_axis(resolution)});
  return geometry::sample_chart(
      dom, Signature(0, 5),
      [eps](std::span<const double> x) {
        return std::vector<double>{std::cos(x[0]), std::sin(x[0]), std::cos(x[1]), std::sin(x[1]),
                                   eps * std::sin(x[0] + x[1])};
      },
      "twisted_torus");
}

ImmersionSample perturbed_cylinder(int resolution, double eps, double half_length, int count) {
  ParamDomain dom({periodic_axis(resolution)});
  auto core = geometry::sample_chart(
      dom, Signature(0, 4),
      [eps](std::span<const double> x) {
        return std::vector<double>{std::cos(x[0]), std::sin(x[0]), eps * std::cos(2.0 * x[0]), 0.0};
      },
      "perturbed_circle");
  auto out = cylinder_product(core, {3}, half_length, count);
  out.name = "perturbed_cylinder";
  return out;
}

ImmersionSample de_sitter_patch(int resolution) {
  ParamDomain dom({{-1.0, 1.0, std::max(resolution / 2, 8), false}, periodic_axis(resolution)});
  return geometry::sample_chart(
      dom, Signature(1, 3),
      [](std::span<const double> x) {
        return std::vector<double>{std::sinh(x[0]), std::cosh(x[0]) * std::cos(x[1]), std::cosh(x[0]) * std::sin(x[1])};
      },
      "de_sitter_patch");
}

ImmersionSample lightcone_circle(int resolution) {
  ParamDomain dom({periodic_axis(resolution)});
  return geometry::sample_chart(
      dom, Signature(1, 3),
      [](std::span<const double> x) { return std::vector<double>{1.0, std::cos(x[0]), std::sin(x[0])}; },
      "lightcone_circle");
}

const std::vector<Entry>& list_catalog() {
  static const std::vector<Entry> entries = {
      {"circle", 1, 0, 2, 1.0, 1.0, std::vector<double>{1.0}, "P = g", true, false, true,
       "unit circle, periodic"},
      {"sphere_m2", 2, 0, 3, 2.0, 2.0, std::vector<double>{1.0, 1.0}, "P = g", true, false, true,
       "S^2(sqrt 2), latitude band"},
      {"sphere_m2_minkowski", 2, 1, 5, 2.0, 2.0, std::vector<double>{1.0, 1.0}, "P = g", true, false, true,
       "S^2(sqrt 2) on the positive axes of R^{1,4}"},
      {"clifford_torus", 2, 0, 4, 2.0, 2.0, std::vector<double>{1.0, 1.0}, "P = g", true, false, true,
       "S^1 x S^1 in R^4, periodic"},
      {"hyperbolic_expander", 2, 1, 3, -1.0, -4.0, std::vector<double>{-2.0, -2.0}, "P = -2 g", false, true, true,
       "hyperbolic plane in R^{1,2}, annular patch; not a shrinker"},
      {"cylinder", 2, 0, 3, std::nullopt, 1.0, std::vector<double>{1.0, 0.0}, "rank 1", true, false, true,
       "S^1(1) x R"},
      {"cylinder_minkowski", 2, 1, 4, std::nullopt, 1.0, std::vector<double>{1.0, 0.0}, "rank 1", true, false, true,
       "S^1(1) x R in R^{1,3} on positive axes"},
      {"al_cylinder", 2, 0, 3, std::nullopt, std::nullopt, std::nullopt,
       "rank 1, eigenvector along grad |H|", true, false, true, "closed 2/3 Abresch-Langer curve x R"},
      {"affine_plane", 2, 0, 3, std::nullopt, 0.0, std::vector<double>{0.0, 0.0}, "P = 0", true, false, true,
       "plane through the origin; every residual vanishes"},
      {"twisted_torus", 2, 0, 5, std::nullopt, std::nullopt, std::nullopt, "", false, false, true,
       "torus with curved normal bundle in R^5"},
      {"perturbed_cylinder", 2, 0, 4, std::nullopt, std::nullopt, std::nullopt, "", false, false, true,
       "space curve x R; principal normal not parallel"},
      {"de_sitter_patch", 2, 1, 3, 1.0, std::nullopt, std::nullopt, "", false, false, false,
       "de Sitter band in R^{1,2}; Lorentzian, not spacelike"},
      {"lightcone_circle", 1, 1, 3, 0.0, 1.0, std::nullopt, "", false, false, true,
       "spacelike circle on the light cone; k = 0"},
  };
  return entries;
}

const Entry& entry(const std::string& name) {
  for (const auto& e : list_catalog())
    if (e.name == name) return e;
  throw UsageError("unknown catalog case '" + name + "'");
}

const alcurve::ClosedCurve& default_al_curve() {
  static std::once_flag once;
  static alcurve::ClosedCurve curve;
  std::call_once(once, [] {
    const auto res = alcurve::find_closed(0.3, 0.9, 2, 3);
    if (!res.found || !res.curve) throw Error("default Abresch-Langer curve search failed: " + res.message);
    curve = *res.curve;
  });
  return curve;
}

ImmersionSample build_case(const std::string& name, int resolution) {
  const Entry& e = entry(name);
  (void)e;
  if (name == "circle") return circle(resolution);
  if (name == "sphere_m2") return sphere(2, Signature(0, 3), resolution);
  if (name == "sphere_m2_minkowski") return sphere(2, Signature(1, 5), resolution);
  if (name == "clifford_torus") return clifford_torus(resolution);
  if (name == "hyperbolic_expander") return hyperbolic_expander(1.0, resolution);
  if (name == "cylinder") return cylinder_product(sphere(1, Signature(0, 3), resolution), {2});
  if (name == "cylinder_minkowski") {
    return cylinder_product(sphere(1, Signature(1, 4), resolution), {3});
  }
  if (name == "al_cylinder") return al_cylinder(default_al_curve(), resolution);
  if (name == "affine_plane") return affine_plane(resolution);
  if (name == "twisted_torus") return twisted_torus(resolution);
  if (name == "perturbed_cylinder") return perturbed_cylinder(resolution);
  if (name == "de_sitter_patch") return de_sitter_patch(resolution);
  if (name == "lightcone_circle") return lightcone_circle(resolution);
  throw UsageError("unknown catalog case '" + name + "'");
}

}  // namespace pseudomcf::catalog
