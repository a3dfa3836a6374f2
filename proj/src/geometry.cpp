#include "pseudomcf/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "pseudomcf/errors.hpp"
#include "pseudomcf/parallel.hpp"

namespace pseudomcf::geometry {

namespace {

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

// Index tables for a rank-r tuple space of dimension m.
struct TupleTable {
  int m = 0;
  int rank = 0;
  std::vector<std::vector<int>> idx;
  TupleTable(int m_, int r_) : m(m_), rank(r_) {
    const std::size_t n = mesh::tuple_count(m, rank);
    idx.reserve(n);
    for (std::size_t t = 0; t < n; ++t) idx.push_back(mesh::unflatten_index(m, rank, t));
  }
  std::size_t replace(std::size_t t, int pos, int value) const {
    auto v = idx[t];
    v[sz(pos)] = value;
    return mesh::flat_index(m, v);
  }
};

void require_width(const GridField& f, int width, const char* what) {
  if (f.width() != width) {
    throw UsageError(std::string(what) + ": expected width " + std::to_string(width) + ", got " +
                     std::to_string(f.width()));
  }
}

}  // namespace

ImmersionSample::ImmersionSample(ParamDomain d, Signature s, GridField p, std::string n)
    : domain(std::move(d)), signature(s), positions(std::move(p)), name(std::move(n)) {
  if (!(positions.domain() == domain) || positions.rank() != 0 || positions.width() != signature.dim()) {
    throw UsageError("immersion positions must be a rank-0 field of width n on the sample domain");
  }
}

AmbientVec ImmersionSample::position(std::size_t node) const {
  auto v = positions.node(node);
  return AmbientVec(signature, std::vector<double>(v.begin(), v.end()));
}

ImmersionSample sample_chart(const ParamDomain& domain, const Signature& sig, const mesh::Chart& chart,
                             std::string name) {
  return ImmersionSample(domain, sig, mesh::build_grid(domain, sig.dim(), chart), std::move(name));
}

int effective_mask_width(const ParamDomain& domain, const GeometryOptions& opt) {
  (void)domain;
  return opt.mask_width >= 0 ? opt.mask_width : 4 * mesh::stencil_half_width(opt.order);
}

double invert_small(int m, std::span<const double> in, std::span<double> out) {
  if (m == 1) {
    if (in[0] == 0.0) return 0.0;
    out[0] = 1.0 / in[0];
    return in[0];
  }
  if (m == 2) {
    const double det = in[0] * in[3] - in[1] * in[2];
    if (det == 0.0) return 0.0;
    out[0] = in[3] / det;
    out[1] = -in[1] / det;
    out[2] = -in[2] / det;
    out[3] = in[0] / det;
    return det;
  }
  // Gauss-Jordan with partial pivoting.
  std::vector<double> a(in.begin(), in.end());
  std::vector<double> inv(sz(m * m), 0.0);
  for (int i = 0; i < m; ++i) inv[sz(i * m + i)] = 1.0;
  double det = 1.0;
  for (int col = 0; col < m; ++col) {
    int piv = col;
    for (int r = col + 1; r < m; ++r)
      if (std::abs(a[sz(r * m + col)]) > std::abs(a[sz(piv * m + col)])) piv = r;
    if (a[sz(piv * m + col)] == 0.0) return 0.0;
    if (piv != col) {
      for (int c = 0; c < m; ++c) {
        std::swap(a[sz(piv * m + c)], a[sz(col * m + c)]);
        std::swap(inv[sz(piv * m + c)], inv[sz(col * m + c)]);
      }
      det = -det;
    }
    const double p = a[sz(col * m + col)];
    det *= p;
    for (int c = 0; c < m; ++c) {
      a[sz(col * m + c)] /= p;
      inv[sz(col * m + c)] /= p;
    }
    for (int r = 0; r < m; ++r) {
      if (r == col) continue;
      const double f = a[sz(r * m + col)];
      if (f == 0.0) continue;
      for (int c = 0; c < m; ++c) {
        a[sz(r * m + c)] -= f * a[sz(col * m + c)];
        inv[sz(r * m + c)] -= f * inv[sz(col * m + c)];
      }
    }
  }
  std::copy(inv.begin(), inv.end(), out.begin());
  return det;
}

GridField induced_metric(const GridField& tangents, const Signature& sig) {
  require_width(tangents, sig.dim(), "induced_metric");
  const int m = tangents.tangent_dim();
  GridField g(tangents.domain(), 2, 1);
  parallel_for(tangents.nodes(), [&](std::size_t k) {
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        const double v = ambient::inner(sig, tangents.value(k, sz(i)), tangents.value(k, sz(j)));
        g(k, sz(i * m + j)) = v;
        g(k, sz(j * m + i)) = v;
      }
  });
  return g;
}

GridField inverse_metric(const GridField& g, const NodeMask& mask, double tau_det) {
  const int m = g.tangent_dim();
  GridField inv(g.domain(), 2, 1);
  std::vector<double> dets(g.nodes());
  parallel_for(g.nodes(), [&](std::size_t k) {
    dets[k] = invert_small(m, g.node(k), inv.node(k));
    if (dets[k] == 0.0) {
      for (double& x : inv.node(k)) x = std::numeric_limits<double>::quiet_NaN();
    }
    // Exact symmetry of the stored inverse.
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        const double v = 0.5 * (inv(k, sz(i * m + j)) + inv(k, sz(j * m + i)));
        inv(k, sz(i * m + j)) = v;
        inv(k, sz(j * m + i)) = v;
      }
  });
  double scale = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < g.nodes(); ++k) {
    if (!mask[k]) continue;
    double tr = 0.0;
    for (int i = 0; i < m; ++i) tr += std::abs(g(k, sz(i * m + i)));
    scale += std::pow(tr / m, m);
    ++count;
  }
  scale = count ? scale / static_cast<double>(count) : 1.0;
  for (std::size_t k = 0; k < g.nodes(); ++k) {
    if (mask[k] && !(std::abs(dets[k]) >= tau_det * scale)) {
      const auto x = g.domain().coordinates(k);
      std::string where = "(";
      for (std::size_t a = 0; a < x.size(); ++a) where += (a ? ", " : "") + std::to_string(x[a]);
      where += ")";
      throw DegenerateMetricError("degenerate induced metric at node " + std::to_string(k) + " " + where +
                                      ", |det g| = " + std::to_string(std::abs(dets[k])),
                                  k);
    }
  }
  return inv;
}

bool check_spacelike(const GridField& g, const NodeMask& mask) {
  const int m = g.tangent_dim();
  for (std::size_t k = 0; k < g.nodes(); ++k) {
    if (!mask[k]) continue;
    for (int r = 1; r <= m; ++r) {
      Eigen::MatrixXd minor(r, r);
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) minor(i, j) = g(k, sz(i * m + j));
      if (!(minor.determinant() > 0.0)) return false;
    }
  }
  return true;
}

GridField christoffel(const GridField& g, const GridField& g_inv, int order) {
  const int m = g.tangent_dim();
  const GridField dg = mesh::gradient(g, order);  // (l, i, j) = d_l g_ij
  GridField gamma(g.domain(), 3, 1);
  const auto m2 = sz(m * m);
  parallel_for(g.nodes(), [&](std::size_t k) {
    auto d = dg.node(k);
    auto gi = g_inv.node(k);
    auto out = gamma.node(k);
    auto dgv = [&](int l, int i, int j) { return d[sz(l) * m2 + sz(i * m + j)]; };
    for (int c = 0; c < m; ++c)
      for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
          double s = 0.0;
          for (int l = 0; l < m; ++l)
            s += gi[sz(c * m + l)] * (dgv(i, j, l) + dgv(j, i, l) - dgv(l, i, j));
          out[sz(c) * m2 + sz(i * m + j)] = 0.5 * s;
          out[sz(c) * m2 + sz(j * m + i)] = 0.5 * s;
        }
  });
  return gamma;
}

GridField second_fundamental(const GridField& hess_f, const GridField& tangents, const GridField& gamma) {
  const int m = tangents.tangent_dim();
  const int n = tangents.width();
  GridField a(tangents.domain(), 2, n);
  const auto m2 = sz(m * m);
  parallel_for(tangents.nodes(), [&](std::size_t k) {
    auto gm = gamma.node(k);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        auto src = hess_f.value(k, sz(i * m + j));
        auto dst = a.value(k, sz(i * m + j));
        for (int c = 0; c < n; ++c) dst[sz(c)] = src[sz(c)];
        for (int l = 0; l < m; ++l) {
          const double coef = gm[sz(l) * m2 + sz(i * m + j)];
          auto fl = tangents.value(k, sz(l));
          for (int c = 0; c < n; ++c) dst[sz(c)] -= coef * fl[sz(c)];
        }
        auto mirror = a.value(k, sz(j * m + i));
        for (int c = 0; c < n; ++c) mirror[sz(c)] = dst[sz(c)];
      }
  });
  return a;
}

GridField mean_curvature(const GridField& a, const GridField& g_inv) {
  const int m = a.tangent_dim();
  const int n = a.width();
  GridField h(a.domain(), 0, n);
  parallel_for(a.nodes(), [&](std::size_t k) {
    auto gi = g_inv.node(k);
    auto out = h.value(k, 0);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        auto aij = a.value(k, sz(i * m + j));
        const double w = gi[sz(i * m + j)];
        for (int c = 0; c < n; ++c) out[sz(c)] += w * aij[sz(c)];
      }
  });
  return h;
}

GridField theta_form(const GridField& positions, const GridField& tangents, const Signature& sig) {
  const int m = tangents.tangent_dim();
  GridField th(tangents.domain(), 1, 1);
  parallel_for(tangents.nodes(), [&](std::size_t k) {
    for (int i = 0; i < m; ++i) th(k, sz(i)) = ambient::inner(sig, tangents.value(k, sz(i)), positions.value(k, 0));
  });
  return th;
}

AuxTensors aux_tensors(const GridField& a, const GridField& h, const GridField& g_inv, const Signature& sig) {
  const int m = a.tangent_dim();
  AuxTensors out{GridField(a.domain(), 2, 1), GridField(a.domain(), 2, 1), GridField(a.domain(), 4, 1)};
  parallel_for(a.nodes(), [&](std::size_t k) {
    auto gi = g_inv.node(k);
    auto av = [&](int i, int j) { return a.value(k, sz(i * m + j)); };
    // S first; P and Q are contractions of the same inner products.
    std::vector<double> s(mesh::tuple_count(m, 4));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int p = 0; p < m; ++p)
          for (int q = 0; q < m; ++q) {
            const std::size_t t = sz(((i * m + j) * m + p) * m + q);
            s[t] = ambient::inner(sig, av(i, j), av(p, q));
          }
    // Enforce the pair symmetries bitwise.
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int p = 0; p < m; ++p)
          for (int q = 0; q < m; ++q) {
            const int ci = std::min(i, j), cj = std::max(i, j);
            const int cp = std::min(p, q), cq = std::max(p, q);
            int a1 = ci, a2 = cj, b1 = cp, b2 = cq;
            if (std::make_pair(b1, b2) < std::make_pair(a1, a2)) {
              std::swap(a1, b1);
              std::swap(a2, b2);
            }
            out.s(k, sz(((i * m + j) * m + p) * m + q)) = s[sz(((a1 * m + a2) * m + b1) * m + b2)];
          }
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        const double pv = ambient::inner(sig, h.value(k, 0), av(i, j));
        out.p(k, sz(i * m + j)) = pv;
        out.p(k, sz(j * m + i)) = pv;
        double qv = 0.0;
        for (int c = 0; c < m; ++c)
          for (int l = 0; l < m; ++l)
            qv += gi[sz(c * m + l)] * out.s(k, sz(((l * m + i) * m + c) * m + j));
        out.q(k, sz(i * m + j)) = qv;
        out.q(k, sz(j * m + i)) = qv;
      }
  });
  return out;
}

PrincipalNormal principal_normal(const GridField& h, const GridField& h_norm2, const NodeMask& mask, double tau_h) {
  for (std::size_t k = 0; k < h.nodes(); ++k) {
    if (mask[k] && !(std::abs(h_norm2(k, 0)) >= tau_h)) {
      throw NullMeanCurvatureError("mean curvature is null (|<H,H>| = " + std::to_string(std::abs(h_norm2(k, 0))) +
                                       ") at node " + std::to_string(k),
                                   k);
    }
  }
  PrincipalNormal pn{GridField(h.domain(), 0, h.width()), GridField(h.domain(), 0, 1)};
  parallel_for(h.nodes(), [&](std::size_t k) {
    const double n2 = h_norm2(k, 0);
    const double inv = 1.0 / std::sqrt(std::abs(n2));
    pn.sigma(k, 0) = n2 > 0.0 ? 1.0 : (n2 < 0.0 ? -1.0 : 0.0);
    for (int c = 0; c < h.width(); ++c) pn.nu(k, sz(c)) = h(k, sz(c)) * inv;
  });
  return pn;
}

GridField covariant_derivative(const GridField& t, const GridField& gamma, int order) {
  const int m = t.tangent_dim();
  const int r = t.rank();
  const int w = t.width();
  GridField out = mesh::gradient(t, order);
  const TupleTable in_tab(m, r);
  const std::size_t in_tuples = in_tab.idx.size();
  const auto m2 = sz(m * m);
  parallel_for(t.nodes(), [&](std::size_t k) {
    auto gm = gamma.node(k);
    for (int dk = 0; dk < m; ++dk)
      for (std::size_t tup = 0; tup < in_tuples; ++tup) {
        auto dst = out.value(k, sz(dk) * in_tuples + tup);
        for (int pos = 0; pos < r; ++pos) {
          const int ih = in_tab.idx[tup][sz(pos)];
          for (int p = 0; p < m; ++p) {
            const double coef = gm[sz(p) * m2 + sz(dk * m + ih)];
            if (coef == 0.0) continue;
            auto src = t.value(k, in_tab.replace(tup, pos, p));
            for (int c = 0; c < w; ++c) dst[sz(c)] -= coef * src[sz(c)];
          }
        }
      }
  });
  return out;
}

Curvature riemann_and_ricci(const GridField& g, const GridField& g_inv, const GridField& gamma, int order) {
  const int m = g.tangent_dim();
  const GridField dgamma = mesh::gradient(gamma, order);  // (i, l, a, b) = d_i Gamma^l_ab
  Curvature cv{GridField(g.domain(), 4, 1), GridField(g.domain(), 2, 1), GridField(g.domain(), 0, 1)};
  const auto mm = sz(m);
  auto idx3 = [&](int l, int a, int b) { return (sz(l) * mm + sz(a)) * mm + sz(b); };
  auto idx4 = [&](int a, int b, int c, int d) { return ((sz(a) * mm + sz(b)) * mm + sz(c)) * mm + sz(d); };
  parallel_for(g.nodes(), [&](std::size_t k) {
    auto gm = gamma.node(k);
    auto dg = dgamma.node(k);
    auto gk = g.node(k);
    auto gi = g_inv.node(k);
    std::vector<double> up(mesh::tuple_count(m, 4));  // R^l_{kij} at (l,k,i,j)
    for (int l = 0; l < m; ++l)
      for (int kk = 0; kk < m; ++kk)
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) {
            double v = dg[sz(i) * mm * mm * mm + idx3(l, j, kk)] - dg[sz(j) * mm * mm * mm + idx3(l, i, kk)];
            for (int p = 0; p < m; ++p) v += gm[idx3(l, i, p)] * gm[idx3(p, j, kk)] - gm[idx3(l, j, p)] * gm[idx3(p, i, kk)];
            up[idx4(l, kk, i, j)] = v;
          }
    auto rl = cv.riemann.node(k);
    for (int s = 0; s < m; ++s)
      for (int kk = 0; kk < m; ++kk)
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) {
            double v = 0.0;
            for (int l = 0; l < m; ++l) v += gk[sz(s * m + l)] * up[idx4(l, kk, i, j)];
            rl[idx4(s, kk, i, j)] = v;
          }
    double scal = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double v = 0.0;
        for (int a = 0; a < m; ++a)
          for (int b = 0; b < m; ++b) v += gi[sz(a * m + b)] * rl[idx4(a, i, b, j)];
        cv.ricci(k, sz(i * m + j)) = v;
      }
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        const double v = 0.5 * (cv.ricci(k, sz(i * m + j)) + cv.ricci(k, sz(j * m + i)));
        cv.ricci(k, sz(i * m + j)) = v;
        cv.ricci(k, sz(j * m + i)) = v;
      }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) scal += gi[sz(i * m + j)] * cv.ricci(k, sz(i * m + j));
    cv.scalar(k, 0) = scal;
  });
  return cv;
}

Frame::Frame(const ImmersionSample& sample, const GeometryOptions& opt)
    : sample_(sample),
      opt_(opt),
      mask_(mesh::interior_mask(sample.domain, effective_mask_width(sample.domain, opt))),
      tangents_(mesh::gradient(sample.positions, opt.order)),
      hess_f_(mesh::hessian(sample.positions, opt.order)),
      g_(induced_metric(tangents_, sample.signature)),
      g_inv_(geometry::inverse_metric(g_, mask_, opt.tau_det)),
      gamma_(geometry::christoffel(g_, g_inv_, opt.order)),
      a_(geometry::second_fundamental(hess_f_, tangents_, gamma_)),
      h_(geometry::mean_curvature(a_, g_inv_)),
      h_norm2_(sample.domain, 0, 1),
      theta_(theta_form(sample.positions, tangents_, sample.signature)) {
  if (mask_.degenerate) {
    throw UsageError("interior mask of width " + std::to_string(effective_mask_width(sample.domain, opt)) +
                     " leaves no node on this grid");
  }
  for (std::size_t k = 0; k < nodes(); ++k) h_norm2_(k, 0) = ambient::norm2(signature(), h_.value(k, 0));
}

bool Frame::spacelike() const { return check_spacelike(g_, mask_); }

namespace {

// v_top at node k: g^{ij}<v,F_i>F_j.
void tangent_part(const Frame& f, std::size_t k, std::span<const double> v, std::span<double> out) {
  const int m = f.dim();
  const int n = f.signature().dim();
  std::vector<double> proj(sz(m));
  for (int i = 0; i < m; ++i) proj[sz(i)] = ambient::inner(f.signature(), v, f.tangents().value(k, sz(i)));
  std::fill(out.begin(), out.end(), 0.0);
  auto gi = f.inverse_metric().node(k);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double w = gi[sz(i * m + j)] * proj[sz(i)];
      auto fj = f.tangents().value(k, sz(j));
      for (int c = 0; c < n; ++c) out[sz(c)] += w * fj[sz(c)];
    }
}

}  // namespace

std::pair<AmbientVec, AmbientVec> Frame::tangent_normal_project(const AmbientVec& v, std::size_t node) const {
  if (!(v.signature() == signature())) throw UsageError("tangent_normal_project: signature mismatch");
  AmbientVec top(signature());
  tangent_part(*this, node, v.components(), top.components());
  return {top, v - top};
}

GridField Frame::normal_project(const GridField& t) const {
  require_width(t, signature().dim(), "normal_project");
  GridField out = t;
  const int n = signature().dim();
  parallel_for(nodes(), [&](std::size_t k) {
    std::vector<double> top(sz(n));
    for (std::size_t tup = 0; tup < t.tuples(); ++tup) {
      tangent_part(*this, k, t.value(k, tup), top);
      auto dst = out.value(k, tup);
      for (int c = 0; c < n; ++c) dst[sz(c)] -= top[sz(c)];
    }
  });
  return out;
}

double Frame::tangential_fraction(const GridField& t) const {
  require_width(t, signature().dim(), "tangential_fraction");
  double worst_top = 0.0;
  double biggest = 0.0;
  std::vector<double> top(sz(signature().dim()));
  for (std::size_t k = 0; k < nodes(); ++k) {
    if (!mask_[k]) continue;
    for (std::size_t tup = 0; tup < t.tuples(); ++tup) {
      tangent_part(*this, k, t.value(k, tup), top);
      worst_top = std::max(worst_top, ambient::euclidean_norm(top));
      biggest = std::max(biggest, ambient::euclidean_norm(t.value(k, tup)));
    }
  }
  return biggest > 0.0 ? worst_top / biggest : 0.0;
}

GridField Frame::position_normal() const { return normal_project(sample_.positions); }

GridField Frame::position_tangent() const {
  GridField out = sample_.positions;
  const auto perp = position_normal();
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] -= perp.data()[i];
  return out;
}

GridField Frame::normal_covariant_derivative(const GridField& t, bool check) const {
  require_width(t, signature().dim(), "normal_covariant_derivative");
  const double frac = check ? tangential_fraction(t) : 0.0;
  if (frac > opt_.normality_tol) {
    throw UsageError("field is not normal-valued: tangential fraction " + std::to_string(frac) + " exceeds " +
                     std::to_string(opt_.normality_tol));
  }
  return normal_project(covariant_derivative(normal_project(t), gamma_, opt_.order));
}

GridField Frame::rough_laplacian(const GridField& f) const {
  const int m = dim();
  if (f.width() == 1 && f.rank() == 0) {
    const GridField hess = mesh::hessian(f, opt_.order);
    const GridField grad = mesh::gradient(f, opt_.order);
    GridField out(f.domain(), 0, 1);
    const auto m2 = sz(m * m);
    parallel_for(nodes(), [&](std::size_t k) {
      auto gi = g_inv_.node(k);
      auto gm = gamma_.node(k);
      double s = 0.0;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          double v = hess(k, sz(i * m + j));
          for (int c = 0; c < m; ++c) v -= gm[sz(c) * m2 + sz(i * m + j)] * grad(k, sz(c));
          s += gi[sz(i * m + j)] * v;
        }
      out(k, 0) = s;
    });
    return out;
  }
  GridField second = f.width() == signature().dim()
                         ? normal_covariant_derivative(normal_covariant_derivative(f), false)
                         : covariant_derivative(covariant_derivative(f, gamma_, opt_.order), gamma_, opt_.order);
  GridField out(f.domain(), f.rank(), f.width());
  const std::size_t inner_block = f.block();
  parallel_for(nodes(), [&](std::size_t k) {
    auto gi = g_inv_.node(k);
    auto src = second.node(k);
    auto dst = out.node(k);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double w = gi[sz(i * m + j)];
        const std::size_t off = sz(i * m + j) * inner_block;
        for (std::size_t c = 0; c < inner_block; ++c) dst[c] += w * src[off + c];
      }
  });
  return out;
}

AuxTensors Frame::aux() const { return aux_tensors(a_, h_, g_inv_, signature()); }

PrincipalNormal Frame::principal_normal() const {
  return geometry::principal_normal(h_, h_norm2_, mask_, opt_.tau_h);
}

Curvature Frame::curvature() const { return riemann_and_ricci(g_, g_inv_, gamma_, opt_.order); }

double Frame::inverse_defect() const {
  const int m = dim();
  double worst = 0.0;
  for (std::size_t k = 0; k < nodes(); ++k) {
    if (!mask_[k]) continue;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (int l = 0; l < m; ++l) s += g_inv_(k, sz(i * m + l)) * g_(k, sz(l * m + j));
        worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
      }
  }
  return worst;
}

std::vector<double> node_max_norm(const GridField& t) {
  std::vector<double> out(t.nodes(), 0.0);
  for (std::size_t k = 0; k < t.nodes(); ++k) {
    double best = 0.0;
    for (std::size_t tup = 0; tup < t.tuples(); ++tup) {
      auto v = t.value(k, tup);
      best = std::max(best, t.width() == 1 ? std::abs(v[0]) : ambient::euclidean_norm(v));
    }
    out[k] = best;
  }
  return out;
}

GridField raise_all(const GridField& t, const GridField& g_inv) {
  const int m = t.tangent_dim();
  const int r = t.rank();
  const int w = t.width();
  GridField cur = t;
  const TupleTable tab(m, r);
  for (int pos = 0; pos < r; ++pos) {
    GridField next(t.domain(), r, w);
    parallel_for(t.nodes(), [&](std::size_t k) {
      auto gi = g_inv.node(k);
      for (std::size_t tup = 0; tup < tab.idx.size(); ++tup) {
        const int i = tab.idx[tup][sz(pos)];
        auto dst = next.value(k, tup);
        for (int a = 0; a < m; ++a) {
          const double coef = gi[sz(i * m + a)];
          auto src = cur.value(k, tab.replace(tup, pos, a));
          for (int c = 0; c < w; ++c) dst[sz(c)] += coef * src[sz(c)];
        }
      }
    });
    cur = std::move(next);
  }
  return cur;
}

GridField full_contraction(const GridField& t, const GridField& u, const GridField& g_inv, const Signature& sig) {
  if (!t.same_shape(u)) throw UsageError("full_contraction: shape mismatch");
  const GridField up = raise_all(u, g_inv);
  GridField out(t.domain(), 0, 1);
  parallel_for(t.nodes(), [&](std::size_t k) {
    double s = 0.0;
    for (std::size_t tup = 0; tup < t.tuples(); ++tup) {
      if (t.width() == 1) {
        s += t(k, tup) * up(k, tup);
      } else {
        s += ambient::inner(sig, t.value(k, tup), up.value(k, tup));
      }
    }
    out(k, 0) = s;
  });
  return out;
}

GeneralizedEigen generalized_symmetric_eigen(int m, std::span<const double> a, std::span<const double> g) {
  Eigen::MatrixXd am(m, m), gm(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      am(i, j) = 0.5 * (a[sz(i * m + j)] + a[sz(j * m + i)]);
      gm(i, j) = 0.5 * (g[sz(i * m + j)] + g[sz(j * m + i)]);
    }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(am, gm);
  if (solver.info() != Eigen::Success) throw UsageError("generalized eigenproblem failed (metric not positive definite?)");
  GeneralizedEigen out;
  for (int c = m - 1; c >= 0; --c) {
    out.values.push_back(solver.eigenvalues()(c));
    std::vector<double> v(sz(m));
    for (int i = 0; i < m; ++i) v[sz(i)] = solver.eigenvectors()(i, c);
    out.vectors.push_back(std::move(v));
  }
  return out;
}

}  // namespace pseudomcf::geometry
