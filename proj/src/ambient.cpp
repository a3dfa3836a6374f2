#include "pseudomcf/ambient.hpp"

#include <algorithm>
#include <cmath>

#include "pseudomcf/errors.hpp"

namespace pseudomcf::ambient {

Signature::Signature(int q, int n) : q_(q), n_(n) {
  if (n < 2 || q < 0 || q > n) {
    throw UsageError("signature requires 0 <= q <= n and n >= 2, got q=" + std::to_string(q) +
                     " n=" + std::to_string(n));
  }
}

std::string Signature::to_string() const {
  return "R^{" + std::to_string(q_) + "," + std::to_string(n_) + "}";
}

double inner(const Signature& sig, std::span<const double> u, std::span<const double> v) {
  double neg = 0.0;
  double pos = 0.0;
  const int q = sig.index();
  const int n = sig.dim();
  for (int a = 0; a < q; ++a) neg += u[a] * v[a];
  for (int a = q; a < n; ++a) pos += u[a] * v[a];
  return pos - neg;
}

double norm2(const Signature& sig, std::span<const double> v) { return inner(sig, v, v); }

double euclidean_norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double euclidean_norm(std::span<const double> v) { return std::sqrt(euclidean_norm2(v)); }

AmbientVec::AmbientVec(Signature sig)
    : sig_(sig), comp_(static_cast<std::size_t>(sig.dim()), 0.0) {}

AmbientVec::AmbientVec(Signature sig, std::vector<double> components)
    : sig_(sig), comp_(std::move(components)) {
  if (static_cast<int>(comp_.size()) != sig_.dim()) {
    throw UsageError("ambient vector has " + std::to_string(comp_.size()) +
                     " components, signature " + sig_.to_string() + " needs " +
                     std::to_string(sig_.dim()));
  }
}

namespace {
void require_same(const Signature& a, const Signature& b) {
  if (!(a == b)) {
    throw UsageError("mismatched signatures " + a.to_string() + " and " + b.to_string());
  }
}
}  // namespace

AmbientVec& AmbientVec::operator+=(const AmbientVec& other) {
  require_same(sig_, other.sig_);
  for (std::size_t i = 0; i < comp_.size(); ++i) comp_[i] += other.comp_[i];
  return *this;
}

AmbientVec& AmbientVec::operator-=(const AmbientVec& other) {
  require_same(sig_, other.sig_);
  for (std::size_t i = 0; i < comp_.size(); ++i) comp_[i] -= other.comp_[i];
  return *this;
}

AmbientVec& AmbientVec::operator*=(double s) {
  for (double& x : comp_) x *= s;
  return *this;
}

AmbientVec operator+(AmbientVec a, const AmbientVec& b) { return a += b; }
AmbientVec operator-(AmbientVec a, const AmbientVec& b) { return a -= b; }
AmbientVec operator*(double s, AmbientVec a) { return a *= s; }

double inner(const AmbientVec& u, const AmbientVec& v) {
  require_same(u.signature(), v.signature());
  return inner(u.signature(), u.components(), v.components());
}

double norm2(const AmbientVec& v) { return inner(v.signature(), v.components(), v.components()); }

double euclidean_norm(const AmbientVec& v) { return euclidean_norm(v.components()); }

PmSplit split_pm(const AmbientVec& v) {
  PmSplit out{AmbientVec(v.signature()), AmbientVec(v.signature())};
  const int q = v.signature().index();
  for (int a = 0; a < v.dim(); ++a) {
    if (a < q) {
      out.minus[a] = v[a];
    } else {
      out.plus[a] = v[a];
    }
  }
  return out;
}

std::string to_string(CausalClass c) {
  switch (c) {
    case CausalClass::spacelike: return "spacelike";
    case CausalClass::timelike: return "timelike";
    case CausalClass::null: return "null";
  }
  return "unknown";
}

CausalClass causal_class(const AmbientVec& v, double tau_rel) {
  const double n2 = norm2(v);
  const double tau = tau_rel * euclidean_norm2(v.components());
  if (n2 > tau) return CausalClass::spacelike;
  if (n2 < -tau) return CausalClass::timelike;
  return CausalClass::null;
}

MarginReport mainly_positive_margin(std::span<const AmbientVec> points, double k_threshold) {
  if (points.empty()) throw UsageError("mainly_positive_margin needs at least one point");
  MarginReport rep;
  for (const auto& p : points) {
    if (euclidean_norm2(p.components()) < k_threshold) continue;
    ++rep.considered;
    const auto parts = split_pm(p);
    // -|F_-|^2 and |F_+|^2 are both Euclidean squares of the blocks.
    const double minus_sq = euclidean_norm2(parts.minus.components());
    const double plus_sq = euclidean_norm2(parts.plus.components());
    if (plus_sq > 0.0) {
      const double r = minus_sq / plus_sq;
      rep.sup_pos_ratio = rep.sup_pos_ratio ? std::max(*rep.sup_pos_ratio, r) : r;
    } else {
      ++rep.pos_singular;
    }
    if (minus_sq > 0.0) {
      const double r = plus_sq / minus_sq;
      rep.sup_neg_ratio = rep.sup_neg_ratio ? std::max(*rep.sup_neg_ratio, r) : r;
    } else {
      ++rep.neg_singular;
    }
  }
  rep.conclusive = rep.considered > 0;
  if (rep.sup_pos_ratio) rep.eps_pos = 1.0 - *rep.sup_pos_ratio;
  if (rep.sup_neg_ratio) rep.eps_neg = 1.0 - *rep.sup_neg_ratio;
  rep.mainly_positive = rep.conclusive && rep.pos_singular == 0 && rep.eps_pos && *rep.eps_pos > 0.0;
  rep.mainly_negative = rep.conclusive && rep.neg_singular == 0 && rep.eps_neg && *rep.eps_neg > 0.0;
  return rep;
}

double split_inner_bound(const AmbientVec& x, const AmbientVec& y) {
  require_same(x.signature(), y.signature());
  const auto xs = split_pm(x);
  const auto ys = split_pm(y);
  return euclidean_norm(xs.plus.components()) * euclidean_norm(ys.plus.components()) +
         std::sqrt(std::max(0.0, -norm2(xs.minus))) * std::sqrt(std::max(0.0, -norm2(ys.minus)));
}

void LinearMap::apply(std::span<const double> in, std::span<double> out) const {
  for (int r = 0; r < n; ++r) {
    double s = 0.0;
    for (int c = 0; c < n; ++c) s += (*this)(r, c) * in[c];
    out[r] = s;
  }
}

LinearMap identity_map(int n) {
  LinearMap m{n, std::vector<double>(static_cast<std::size_t>(n * n), 0.0)};
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

LinearMap compose(const LinearMap& outer, const LinearMap& inner_map) {
  if (outer.n != inner_map.n) throw UsageError("compose: dimension mismatch");
  const int n = outer.n;
  LinearMap m{n, std::vector<double>(static_cast<std::size_t>(n * n), 0.0)};
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += outer(r, k) * inner_map(k, c);
      m(r, c) = s;
    }
  return m;
}

LinearMap plane_rotation(int n, int i, int j, double angle) {
  auto m = identity_map(n);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  m(i, i) = c;
  m(i, j) = -s;
  m(j, i) = s;
  m(j, j) = c;
  return m;
}

LinearMap boost(int n, int i, int j, double rapidity) {
  auto m = identity_map(n);
  const double ch = std::cosh(rapidity);
  const double sh = std::sinh(rapidity);
  m(i, i) = ch;
  m(i, j) = sh;
  m(j, i) = sh;
  m(j, j) = ch;
  return m;
}

double isometry_defect(const Signature& sig, const LinearMap& map) {
  const int n = sig.dim();
  double scale = 0.0;
  for (double x : map.a) scale = std::max(scale, std::abs(x));
  double worst = 0.0;
  std::vector<double> ea(n), eb(n), la(n), lb(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      std::fill(ea.begin(), ea.end(), 0.0);
      std::fill(eb.begin(), eb.end(), 0.0);
      ea[a] = 1.0;
      eb[b] = 1.0;
      map.apply(ea, la);
      map.apply(eb, lb);
      worst = std::max(worst, std::abs(inner(sig, la, lb) - inner(sig, ea, eb)));
    }
  return scale > 0.0 ? worst / (scale * scale) : worst;
}

}  // namespace pseudomcf::ambient
