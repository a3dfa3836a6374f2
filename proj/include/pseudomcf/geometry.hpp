#ifndef PSEUDOMCF_GEOMETRY_HPP_
#define PSEUDOMCF_GEOMETRY_HPP_

// Extrinsic geometry of a sampled immersion F: M -> R^{q,n}.
//
// Index conventions: fields carry lower tangent indices in the order written,
// e.g. the Christoffel field stores Gamma^k_{ij} at tuple (k,i,j) and the
// covariant derivative of T_{i...} stores nabla_k T_{i...} at tuple (k,i,...).
// Curvature follows R(d_i,d_j)d_k = R^l_{kij} d_l with R_{skij} = g_{sl} R^l_{kij}.

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pseudomcf/ambient.hpp"
#include "pseudomcf/mesh.hpp"

namespace pseudomcf::geometry {

using ambient::AmbientVec;
using ambient::Signature;
using mesh::GridField;
using mesh::NodeMask;
using mesh::ParamDomain;

struct ImmersionSample {
  ImmersionSample(ParamDomain domain, Signature signature, GridField positions, std::string name = {});

  ParamDomain domain;
  Signature signature;
  GridField positions;  // rank 0, width n
  std::string name;

  int dim() const { return domain.dim(); }
  int ambient_dim() const { return signature.dim(); }
  AmbientVec position(std::size_t node) const;
};

ImmersionSample sample_chart(const ParamDomain& domain, const Signature& sig, const mesh::Chart& chart,
                             std::string name = {});

struct GeometryOptions {
  int order = 4;
  double tau_det = 1e-10;  // relative to the mean metric scale^m
  double tau_h = 1e-8;
  int mask_width = -1;     // -1: four stencil half-widths, enough for four derivative passes
  double normality_tol = 1e-2;
};

int effective_mask_width(const ParamDomain& domain, const GeometryOptions& opt);

GridField induced_metric(const GridField& tangents, const Signature& sig);
// Inverse metric at every node; DegenerateMetricError names the first masked
// node with |det g| below tau_det times the metric scale.
GridField inverse_metric(const GridField& g, const NodeMask& mask, double tau_det);
// Leading principal minors positive at every masked node.
bool check_spacelike(const GridField& g, const NodeMask& mask);
GridField christoffel(const GridField& g, const GridField& g_inv, int order);
GridField second_fundamental(const GridField& hess_f, const GridField& tangents, const GridField& gamma);
GridField mean_curvature(const GridField& a, const GridField& g_inv);
GridField theta_form(const GridField& positions, const GridField& tangents, const Signature& sig);

struct AuxTensors {
  GridField p;  // <H, A_ij>
  GridField q;  // <A^k_i, A_kj>
  GridField s;  // <A_ij, A_kl>
};
AuxTensors aux_tensors(const GridField& a, const GridField& h, const GridField& g_inv, const Signature& sig);

struct PrincipalNormal {
  GridField nu;     // H / sqrt|<H,H>|
  GridField sigma;  // sign of <H,H>
};
PrincipalNormal principal_normal(const GridField& h, const GridField& h_norm2, const NodeMask& mask, double tau_h);

struct Curvature {
  GridField riemann;  // R_{skij}
  GridField ricci;    // R_ij = g^{kl} R_{kilj}
  GridField scalar;
};
Curvature riemann_and_ricci(const GridField& g, const GridField& g_inv, const GridField& gamma, int order);

// nabla_k T with Christoffel corrections on every lower index; values untouched.
GridField covariant_derivative(const GridField& t, const GridField& gamma, int order);

// Per-node extrinsic package plus the operations that need it.
class Frame {
 public:
  Frame(const ImmersionSample& sample, const GeometryOptions& opt = {});

  const ImmersionSample& sample() const { return sample_; }
  const Signature& signature() const { return sample_.signature; }
  const GeometryOptions& options() const { return opt_; }
  const NodeMask& mask() const { return mask_; }
  int dim() const { return sample_.dim(); }
  std::size_t nodes() const { return sample_.domain.node_count(); }

  const GridField& positions() const { return sample_.positions; }
  const GridField& tangents() const { return tangents_; }
  const GridField& position_hessian() const { return hess_f_; }
  const GridField& metric() const { return g_; }
  const GridField& inverse_metric() const { return g_inv_; }
  const GridField& christoffel() const { return gamma_; }
  const GridField& second_fundamental() const { return a_; }
  const GridField& mean_curvature() const { return h_; }
  const GridField& mean_curvature_norm2() const { return h_norm2_; }
  const GridField& theta() const { return theta_; }

  bool spacelike() const;

  // v_top = g^{ij}<v,F_i>F_j and v_perp = v - v_top at one node.
  std::pair<AmbientVec, AmbientVec> tangent_normal_project(const AmbientVec& v, std::size_t node) const;
  // Normal part of every ambient value of a width-n field.
  GridField normal_project(const GridField& t) const;
  // Largest |v_top|_E over masked nodes relative to the largest |v|_E.
  double tangential_fraction(const GridField& t) const;
  GridField position_normal() const;  // F_perp
  GridField position_tangent() const; // F_top

  // nabla^perp_k T of a normal-valued field. UsageError when the tangential
  // fraction of t exceeds options().normality_tol; pass check = false for
  // fields that are normal by construction.
  GridField normal_covariant_derivative(const GridField& t, bool check = true) const;
  // Trace of the second covariant derivative (normal connection for width-n
  // fields, Levi-Civita for width-1 fields).
  GridField rough_laplacian(const GridField& f) const;

  AuxTensors aux() const;
  PrincipalNormal principal_normal() const;
  Curvature curvature() const;

  // sup over the mask of |<g^{-1}>g - I|, used as a sanity check.
  double inverse_defect() const;

 private:
  ImmersionSample sample_;
  GeometryOptions opt_;
  NodeMask mask_;
  GridField tangents_;
  GridField hess_f_;
  GridField g_;
  GridField g_inv_;
  GridField gamma_;
  GridField a_;
  GridField h_;
  GridField h_norm2_;
  GridField theta_;
};

// Per-node max over tuples of |value|_E (|value| for width-1 fields).
std::vector<double> node_max_norm(const GridField& t);
// Raise every tangent index with g^{-1}; result stores T^{i...} at tuple (i,...).
GridField raise_all(const GridField& t, const GridField& g_inv);
// Full contraction g^{..}...<T,U> of two same-rank fields (scalar per node).
GridField full_contraction(const GridField& t, const GridField& u, const GridField& g_inv, const Signature& sig);

// Eigen-decomposition helper for symmetric m x m problems
// A v = lambda G v, G positive definite; values sorted descending.
struct GeneralizedEigen {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;  // coordinate components, G-normalized
};
GeneralizedEigen generalized_symmetric_eigen(int m, std::span<const double> a, std::span<const double> g);

// Inverts a small dense m x m matrix, returns its determinant (0 on singular input).
double invert_small(int m, std::span<const double> in, std::span<double> out);

}  // namespace pseudomcf::geometry

#endif  // PSEUDOMCF_GEOMETRY_HPP_
