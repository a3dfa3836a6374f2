#ifndef PSEUDOMCF_CATALOG_HPP_
#define PSEUDOMCF_CATALOG_HPP_

// Analytic immersions sampled onto parameter grids.

#include <optional>
#include <string>
#include <vector>

#include "pseudomcf/alcurve.hpp"
#include "pseudomcf/geometry.hpp"

namespace pseudomcf::catalog {

using ambient::Signature;
using geometry::ImmersionSample;

// Round S^m(sqrt m) on the first m+1 positive axes of sig. m = 1 is the
// periodic circle with `resolution` nodes; m = 2 is the latitude band
// theta in [margin, pi - margin] with resolution nodes in phi and
// resolution / 2 in theta.
ImmersionSample sphere(int m, const Signature& sig, int resolution, double polar_margin = 0.3);
ImmersionSample circle(int resolution);

// (cos u, sin u, cos v, sin v) in R^{0,4}, resolution^2 periodic nodes.
ImmersionSample clifford_torus(int resolution);

// (cosh rho, sinh rho cos phi, sinh rho sin phi) in R^{1,2} on the annulus
// rho in [radius / 4, radius]; resolution nodes on each axis.
ImmersionSample hyperbolic_expander(double radius, int resolution);

// core x R^d: flat coordinates on [-half_length, half_length] with `count`
// nodes each, placed along `flat_axes` of the core's ambient space. UsageError
// on a timelike, repeated or occupied flat axis.
ImmersionSample cylinder_product(const ImmersionSample& core, const std::vector<int>& flat_axes,
                                 double half_length = 2.0, int count = 33);

// Closed curve in the first two positive axes of sig, times R^d along the
// following positive axes. UsageError when the curve is not closed to
// `closure_tolerance`.
ImmersionSample al_cylinder(const alcurve::ClosedCurve& curve, int resolution, int d = 1,
                            const Signature& sig = Signature(0, 3), double half_length = 2.0, int count = 33,
                            double closure_tolerance = 1e-4);

// (x, y, 0) in R^{0,3} on [-2, 2]^2 with `count` nodes per axis.
ImmersionSample affine_plane(int count = 17);

// (cos u, sin u, cos v, sin v, eps sin(u + v)) in R^{0,5}: curved normal bundle.
ImmersionSample twisted_torus(int resolution, double eps = 0.3);

// (cos phi, sin phi, eps cos 2 phi) x R in R^{0,4}: principal normal not parallel.
ImmersionSample perturbed_cylinder(int resolution, double eps = 0.1, double half_length = 2.0, int count = 33);

// (sinh t, cosh t cos phi, cosh t sin phi) in R^{1,2}: Lorentzian induced metric.
ImmersionSample de_sitter_patch(int resolution);

// (1, cos phi, sin phi) in R^{1,2}: spacelike circle on the light cone.
ImmersionSample lightcone_circle(int resolution);

struct Entry {
  std::string name;
  int m = 0;
  int q = 0;
  int n = 0;
  std::optional<double> k;                           // constant <F,F>
  std::optional<double> expected_h2;                 // constant <H,H>
  std::optional<std::vector<double>> p_spectrum;     // constant eigenvalues of P
  std::string p_structure;
  bool shrinker = false;
  bool expander = false;
  bool spacelike = true;
  std::string description;
};

// Stable order.
const std::vector<Entry>& list_catalog();
const Entry& entry(const std::string& name);

// The closed 2/3 Abresch-Langer curve used by the "al_cylinder" case.
const alcurve::ClosedCurve& default_al_curve();

// Builds a catalog case at a resolution; UsageError for unknown names.
ImmersionSample build_case(const std::string& name, int resolution);

}  // namespace pseudomcf::catalog

#endif  // PSEUDOMCF_CATALOG_HPP_
