#ifndef PSEUDOMCF_AMBIENT_HPP_
#define PSEUDOMCF_AMBIENT_HPP_

// Linear algebra in the pseudo-Euclidean space R^{q,n}: the first q axes carry
// the sign -1, the remaining n-q axes the sign +1.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pseudomcf::ambient {

class Signature {
 public:
  // Throws UsageError unless 0 <= q <= n and n >= 2.
  Signature(int q, int n);

  int index() const { return q_; }
  int dim() const { return n_; }
  int positive_count() const { return n_ - q_; }
  double sign(int axis) const { return axis < q_ ? -1.0 : 1.0; }
  bool is_timelike_axis(int axis) const { return axis < q_; }

  bool operator==(const Signature&) const = default;

  std::string to_string() const;

 private:
  int q_;
  int n_;
};

// Span-level kernels. Inputs are assumed to have sig.dim() entries; the
// AmbientVec overloads below perform the checks.
double inner(const Signature& sig, std::span<const double> u, std::span<const double> v);
double norm2(const Signature& sig, std::span<const double> v);
double euclidean_norm2(std::span<const double> v);
double euclidean_norm(std::span<const double> v);

class AmbientVec {
 public:
  explicit AmbientVec(Signature sig);
  AmbientVec(Signature sig, std::vector<double> components);

  const Signature& signature() const { return sig_; }
  int dim() const { return sig_.dim(); }
  std::span<const double> components() const { return comp_; }
  std::span<double> components() { return comp_; }
  double operator[](int i) const { return comp_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return comp_[static_cast<std::size_t>(i)]; }

  AmbientVec& operator+=(const AmbientVec& other);
  AmbientVec& operator-=(const AmbientVec& other);
  AmbientVec& operator*=(double s);

 private:
  Signature sig_;
  std::vector<double> comp_;
};

AmbientVec operator+(AmbientVec a, const AmbientVec& b);
AmbientVec operator-(AmbientVec a, const AmbientVec& b);
AmbientVec operator*(double s, AmbientVec a);

// Throws UsageError when u and v carry different signatures.
double inner(const AmbientVec& u, const AmbientVec& v);
double norm2(const AmbientVec& v);
double euclidean_norm(const AmbientVec& v);

struct PmSplit {
  AmbientVec minus;
  AmbientVec plus;
};

// minus keeps the first q axes, plus the rest.
PmSplit split_pm(const AmbientVec& v);

enum class CausalClass { spacelike, timelike, null };

std::string to_string(CausalClass c);

// tau_rel scales the null band with the Euclidean size of v, so the verdict on
// exact data does not depend on the overall scale.
CausalClass causal_class(const AmbientVec& v, double tau_rel = 1e-12);

struct MarginReport {
  bool conclusive = false;      // false when no point passes the threshold
  std::size_t considered = 0;   // points with |F|_E^2 >= k_threshold
  std::size_t pos_singular = 0; // F_+ = 0, ratio undefined
  std::size_t neg_singular = 0; // F_- = 0, ratio undefined
  // sup of -|F_-|^2/|F_+|^2 and of -|F_+|^2/|F_-|^2 over considered points
  // with a defined ratio (nullopt when every considered point was singular).
  std::optional<double> sup_pos_ratio;
  std::optional<double> sup_neg_ratio;
  // Best achievable margins eps = 1 - sup; the set is mainly positive
  // (negative) iff the margin is > 0 and no considered point is singular.
  std::optional<double> eps_pos;
  std::optional<double> eps_neg;
  bool mainly_positive = false;
  bool mainly_negative = false;
};

MarginReport mainly_positive_margin(std::span<const AmbientVec> points, double k_threshold);

// Right-hand side of |<X,Y>| <= |X_+||Y_+| + sqrt(-|X_-|^2) sqrt(-|Y_-|^2).
double split_inner_bound(const AmbientVec& x, const AmbientVec& y);

// Square matrix acting on R^{q,n}, row-major.
struct LinearMap {
  int n = 0;
  std::vector<double> a;

  double operator()(int r, int c) const { return a[static_cast<std::size_t>(r * n + c)]; }
  double& operator()(int r, int c) { return a[static_cast<std::size_t>(r * n + c)]; }
  void apply(std::span<const double> in, std::span<double> out) const;
};

LinearMap identity_map(int n);
LinearMap compose(const LinearMap& outer, const LinearMap& inner_map);
// Rotation by angle in the (i, j) coordinate plane; i, j must share causal type.
LinearMap plane_rotation(int n, int i, int j, double angle);
// Hyperbolic rotation mixing timelike axis i with spacelike axis j.
LinearMap boost(int n, int i, int j, double rapidity);
// max |<Lu,Lv> - <u,v>| over basis pairs, relative to the largest entry of L.
double isometry_defect(const Signature& sig, const LinearMap& map);

}  // namespace pseudomcf::ambient

#endif  // PSEUDOMCF_AMBIENT_HPP_
