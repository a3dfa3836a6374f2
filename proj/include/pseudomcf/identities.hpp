#ifndef PSEUDOMCF_IDENTITIES_HPP_
#define PSEUDOMCF_IDENTITIES_HPP_

// Residual evaluators for the structure equations of a sampled immersion and
// for the self-similarity diagnostics built on them. Every evaluator returns a
// per-node residual norm together with its interior statistics.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pseudomcf/geometry.hpp"

namespace pseudomcf::identities {

using geometry::AuxTensors;
using geometry::Frame;
using geometry::ImmersionSample;
using mesh::GridField;

struct Residual {
  std::string name;
  GridField field;  // rank 0, width 1: per-node max over index tuples of |component|_E
  mesh::NodeStats stats;
  bool skipped = false;
  std::string notice;
};

Residual gauss_residual(const Frame& frame, const AuxTensors& aux);
Residual codazzi_residual(const Frame& frame);
// Skipped (with a notice) in codimension 0.
Residual ricci_normal_residual(const Frame& frame);
Residual simons_residual(const Frame& frame, const AuxTensors& aux);
// Laplacian of <F,F> against 2m + 2<H,F>.
Residual laplace_normF_residual(const Frame& frame);

// Fitted homothety factor lambda of H = -lambda F_perp and the fit quality.
struct HomothetyFit {
  double lambda = 1.0;
  double sup_defect = 0.0;  // interior sup of |H + lambda F_perp|_E
};
HomothetyFit fit_homothety(const Frame& frame);

// Laplacian of <H,H> for H = -lambda F_perp:
// 2 lambda |H|^2 - 2|P|^2 + 2|nabla^perp H|^2 + lambda <F_top, grad |H|^2>.
// UsageError when sup |H + lambda F_perp|_E exceeds gate.
Residual laplace_normH_residual(const Frame& frame, const AuxTensors& aux, double gate = 1e-3);
// |H + F_perp|_E.
Residual shrinker_residual(const Frame& frame);
// |nabla^perp nu|_E; NullMeanCurvatureError when <H,H> nearly vanishes on the mask.
Residual parallel_principal_normal_residual(const Frame& frame);

struct PSpectralReport {
  std::vector<std::vector<double>> eigenvalues;  // per masked node, descending
  double sup_idempotency = 0.0;                  // sup |P^2 - P| in a g-orthonormal frame
  double sup_trace_defect = 0.0;                 // sup |tr P - <H,H>|
  int min_rank = 0;
  int max_rank = 0;
  double rank_tol = 1e-6;
  std::size_t aligned_nodes = 0;                 // nodes where grad |H| was significant
  std::optional<double> min_alignment;           // cosine of grad |H| with the top eigenvector
  // Scalar residuals valid when the principal normal is parallel:
  // P^ij A_ij - |P|^2/|H|^2 H, S_ijkl P^ij P^kl - |P|^4/|H|^2,
  // P_i^k A_kj - P_j^k A_ki, S_ikjl P^ij P^kl - Q_il P^i_k P^kl.
  double item1 = 0.0;
  double item2 = 0.0;
  double item3 = 0.0;
  double item4 = 0.0;
  double shrinker_sup = 0.0;
  bool items_evaluated = false;  // items stay 0 unless shrinker_sup <= shrinker_gate
  std::string notice;
};
// A node enters the alignment statistic when |grad |H||_g exceeds both
// grad_rel times its interior maximum and grad_abs.
PSpectralReport p_spectral_diagnostics(const Frame& frame, const AuxTensors& aux, double rank_tol = 1e-6,
                                       double grad_rel = 1e-2, double grad_abs = 1e-8, double shrinker_gate = 1e-3);

struct BoundedGeometryReport {
  int max_order = 0;
  std::vector<double> c;  // sup |nabla^k A_+|^2, k = 0..K
  std::vector<double> d;  // sup -|nabla^k A_-|^2
  bool mean_curvature_defined = true;
  std::optional<double> sup_inverse_h;
  std::optional<double> growth_exponent;  // slope of log(1/|H|) against log(1 + |<F,F>|)
  double inverse_lipschitz = 0.0;
  std::size_t sampled_pairs = 0;
};
// UsageError when K exceeds the derivative depth the interior mask supports.
BoundedGeometryReport bounded_geometry_report(const Frame& frame, int max_order);

struct ConvergenceRow {
  int resolution = 0;
  double h = 0.0;
  double sup = 0.0;
  double mean = 0.0;
  std::optional<double> order;  // measured against the previous row
};

struct ConvergenceStudy {
  std::string name;
  std::vector<ConvergenceRow> rows;
  std::optional<double> min_order;  // over pairs whose coarse sup exceeds the floor
  double floor = 1e-10;

  // Satisfied when every measured order reaches `required`, or when the
  // finest residual already sits at the rounding floor.
  bool satisfied(double required) const;
};

using SampleFactory = std::function<ImmersionSample(int resolution)>;
using Evaluator = std::function<Residual(const Frame&)>;

ConvergenceStudy convergence_study(const std::string& name, std::span<const int> resolutions,
                                   const SampleFactory& make, const Evaluator& eval,
                                   const geometry::GeometryOptions& opt = {}, double floor = 1e-10);

// Names accepted by evaluate_identity, in report order.
const std::vector<std::string>& identity_names();
Residual evaluate_identity(const std::string& name, const Frame& frame);

}  // namespace pseudomcf::identities

#endif  // PSEUDOMCF_IDENTITIES_HPP_
