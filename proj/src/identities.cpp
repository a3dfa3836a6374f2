#include "pseudomcf/identities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pseudomcf/errors.hpp"
#include "pseudomcf/parallel.hpp"

namespace pseudomcf::identities {

namespace {

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

Residual finish(const std::string& name, const Frame& frame, std::vector<double> per_node) {
  Residual r{name, GridField(frame.sample().domain, 0, 1), {}, false, {}};
  r.field.data() = std::move(per_node);
  r.stats = mesh::masked_stats(r.field.data(), frame.mask());
  return r;
}

Residual finish_tensor(const std::string& name, const Frame& frame, const GridField& t) {
  return finish(name, frame, geometry::node_max_norm(t));
}

std::size_t i2(int m, int a, int b) { return sz(a * m + b); }
std::size_t i3(int m, int a, int b, int c) { return sz((a * m + b) * m + c); }
std::size_t i4(int m, int a, int b, int c, int d) { return sz(((a * m + b) * m + c) * m + d); }

}  // namespace

Residual gauss_residual(const Frame& frame, const AuxTensors& aux) {
  const int m = frame.dim();
  const auto cv = frame.curvature();
  GridField res(frame.sample().domain, 4, 1);
  parallel_for(frame.nodes(), [&](std::size_t k) {
    auto r = cv.riemann.node(k);
    auto s = aux.s.node(k);
    auto out = res.node(k);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j)
            out[i4(m, a, b, i, j)] = r[i4(m, a, b, i, j)] - (s[i4(m, i, a, j, b)] - s[i4(m, j, a, i, b)]);
  });
  return finish_tensor("gauss", frame, res);
}

Residual codazzi_residual(const Frame& frame) {
  const int m = frame.dim();
  const int n = frame.signature().dim();
  const GridField da = frame.normal_covariant_derivative(frame.second_fundamental());
  GridField res(frame.sample().domain, 3, n);
  parallel_for(frame.nodes(), [&](std::size_t k) {
    for (int l = 0; l < m; ++l)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          auto x = da.value(k, i3(m, l, i, j));
          auto y = da.value(k, i3(m, i, l, j));
          auto out = res.value(k, i3(m, l, i, j));
          for (int c = 0; c < n; ++c) out[sz(c)] = x[sz(c)] - y[sz(c)];
        }
  });
  return finish_tensor("codazzi", frame, res);
}

Residual ricci_normal_residual(const Frame& frame) {
  const int m = frame.dim();
  const int n = frame.signature().dim();
  const auto& sig = frame.signature();
  if (n == m) {
    Residual r = finish("ricci_normal", frame, std::vector<double>(frame.nodes(), 0.0));
    r.skipped = true;
    r.notice = "codimension 0: normal bundle is trivial";
    return r;
  }
  const auto& a = frame.second_fundamental();
  const int order = frame.options().order;
  std::vector<double> per_node(frame.nodes(), 0.0);
  for (int alpha = 0; alpha < n; ++alpha) {
    GridField e(frame.sample().domain, 0, n);
    for (std::size_t k = 0; k < frame.nodes(); ++k) e(k, sz(alpha)) = 1.0;
    const GridField eta = frame.normal_project(e);
    const GridField d1 = frame.normal_project(mesh::gradient(eta, order));
    const GridField d2 = frame.normal_project(mesh::gradient(d1, order));  // (i, j): d_i (d_j eta)_perp
    std::vector<double> local(frame.nodes(), 0.0);
    parallel_for(frame.nodes(), [&](std::size_t k) {
      auto gi = frame.inverse_metric().node(k);
      std::vector<double> diff(sz(n));
      double worst = 0.0;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          auto lij = d2.value(k, i2(m, i, j));
          auto lji = d2.value(k, i2(m, j, i));
          for (int c = 0; c < n; ++c) diff[sz(c)] = lij[sz(c)] - lji[sz(c)];
          for (int p = 0; p < m; ++p)
            for (int q = 0; q < m; ++q) {
              const double w = gi[i2(m, p, q)];
              if (w == 0.0) continue;
              const double ej = ambient::inner(sig, eta.value(k, 0), a.value(k, i2(m, j, p)));
              const double ei = ambient::inner(sig, eta.value(k, 0), a.value(k, i2(m, i, p)));
              auto aiq = a.value(k, i2(m, i, q));
              auto ajq = a.value(k, i2(m, j, q));
              for (int c = 0; c < n; ++c) diff[sz(c)] -= w * (ej * aiq[sz(c)] - ei * ajq[sz(c)]);
            }
          worst = std::max(worst, ambient::euclidean_norm(diff));
        }
      local[k] = worst;
    });
    for (std::size_t k = 0; k < frame.nodes(); ++k) per_node[k] = std::max(per_node[k], local[k]);
  }
  return finish("ricci_normal", frame, std::move(per_node));
}

Residual simons_residual(const Frame& frame, const AuxTensors& aux) {
  const int m = frame.dim();
  const int n = frame.signature().dim();
  const auto& a = frame.second_fundamental();
  const auto& h = frame.mean_curvature();
  const GridField ddh = frame.normal_covariant_derivative(frame.normal_covariant_derivative(h), false);
  const GridField lap_a = frame.rough_laplacian(a);
  const GridField a_up = geometry::raise_all(a, frame.inverse_metric());
  const auto cv = frame.curvature();
  GridField res(frame.sample().domain, 2, n);
  parallel_for(frame.nodes(), [&](std::size_t k) {
    auto gi = frame.inverse_metric().node(k);
    auto rm = cv.riemann.node(k);
    auto rc = cv.ricci.node(k);
    auto q = aux.q.node(k);
    auto s = aux.s.node(k);
    for (int kk = 0; kk < m; ++kk)
      for (int l = 0; l < m; ++l) {
        auto out = res.value(k, i2(m, kk, l));
        auto lhs = ddh.value(k, i2(m, kk, l));
        auto lap = lap_a.value(k, i2(m, kk, l));
        for (int c = 0; c < n; ++c) out[sz(c)] = lhs[sz(c)] - lap[sz(c)];
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) {
            const double coef = rm[i4(m, kk, i, l, j)] - s[i4(m, kk, i, l, j)];
            auto aij = a_up.value(k, i2(m, i, j));
            for (int c = 0; c < n; ++c) out[sz(c)] -= coef * aij[sz(c)];
          }
        for (int i = 0; i < m; ++i)
          for (int b = 0; b < m; ++b) {
            const double ric = gi[i2(m, i, b)] * rc[i2(m, b, kk)];
            const double qq = gi[i2(m, i, b)] * q[i2(m, b, l)];
            auto ail = a.value(k, i2(m, i, l));
            auto aik = a.value(k, i2(m, i, kk));
            for (int c = 0; c < n; ++c) out[sz(c)] += ric * ail[sz(c)] - qq * aik[sz(c)];
          }
      }
  });
  return finish_tensor("simons", frame, res);
}

Residual laplace_normF_residual(const Frame& frame) {
  const int m = frame.dim();
  const auto& sig = frame.signature();
  GridField f2(frame.sample().domain, 0, 1);
  for (std::size_t k = 0; k < frame.nodes(); ++k) f2(k, 0) = ambient::norm2(sig, frame.positions().value(k, 0));
  const GridField lap = frame.rough_laplacian(f2);
  std::vector<double> per_node(frame.nodes());
  for (std::size_t k = 0; k < frame.nodes(); ++k) {
    const double rhs = 2.0 * m + 2.0 * ambient::inner(sig, frame.mean_curvature().value(k, 0), frame.positions().value(k, 0));
    per_node[k] = std::abs(lap(k, 0) - rhs);
  }
  return finish("laplace_normF", frame, std::move(per_node));
}

HomothetyFit fit_homothety(const Frame& frame) {
  const GridField perp = frame.position_normal();
  const auto& h = frame.mean_curvature();
  const int n = frame.signature().dim();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < frame.nodes(); ++k) {
    if (!frame.mask()[k]) continue;
    auto hv = h.value(k, 0);
    auto pv = perp.value(k, 0);
    for (int c = 0; c < n; ++c) {
      num += hv[sz(c)] * pv[sz(c)];
      den += pv[sz(c)] * pv[sz(c)];
    }
  }
  HomothetyFit fit;
  fit.lambda = den > 0.0 ? -num / den : 1.0;
  std::vector<double> tmp(sz(n));
  for (std::size_t k = 0; k < frame.nodes(); ++k) {
    if (!frame.mask()[k]) continue;
    for (int c = 0; c < n; ++c) tmp[sz(c)] = h(k, sz(c)) + fit.lambda * perp(k, sz(c));
    fit.sup_defect = std::max(fit.sup_defect, ambient::euclidean_norm(tmp));
  }
  return fit;
}

Residual laplace_normH_residual(const Frame& frame, const AuxTensors& aux, double gate) {
  const HomothetyFit fit = fit_homothety(frame);
  if (fit.sup_defect > gate) {
    throw UsageError("laplace_normH: not a homothetic soliton, sup |H + lambda F_perp| = " +
                     std::to_string(fit.sup_defect) + " with lambda = " + std::to_string(fit.lambda) +
                     " exceeds " + std::to_string(gate));
  }
  const int m = frame.dim();
  const auto& sig = frame.signature();
  const double lambda = fit.lambda;
  const GridField& h2 = frame.mean_curvature_norm2();
  const GridField lap = frame.rough_laplacian(h2);
  const GridField grad = mesh::gradient(h2, frame.options().order);
  const GridField dh = frame.normal_covariant_derivative(frame.mean_curvature());
  const GridField p_norm2 = geometry::full_contraction(aux.p, aux.p, frame.inverse_metric(), sig);
  const GridField dh_norm2 = geometry::full_contraction(dh, dh, frame.inverse_metric(), sig);
  std::vector<double> per_node(frame.nodes());
  for (std::size_t k = 0; k < frame.nodes(); ++k) {
    auto gi = frame.inverse_metric().node(k);
    double transport = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) transport += gi[i2(m, i, j)] * frame.theta()(k, sz(i)) * grad(k, sz(j));
    const double rhs =
        2.0 * lambda * h2(k, 0) - 2.0 * p_norm2(k, 0) + 2.0 * dh_norm2(k, 0) + lambda * transport;
    per_node[k] = std::abs(lap(k, 0) - rhs);
  }
  return finish("laplace_normH", frame, std::move(per_node));
}

Residual shrinker_residual(const Frame& frame) {
  const GridField perp = frame.position_normal();
  GridField sum = frame.mean_curvature();
  for (std::size_t i = 0; i < sum.data().size(); ++i) sum.data()[i] += perp.data()[i];
  return finish_tensor("shrinker", frame, sum);
}

Residual parallel_principal_normal_residual(const Frame& frame) {
  const auto pn = frame.principal_normal();
  return finish_tensor("parallel_principal_normal", frame, frame.normal_covariant_derivative(pn.nu));
}

PSpectralReport p_spectral_diagnostics(const Frame& frame, const AuxTensors& aux, double rank_tol, double grad_rel,
                                       double grad_abs, double shrinker_gate) {
  const int m = frame.dim();
  const int n = frame.signature().dim();
  const auto& sig = frame.signature();
  const auto& g = frame.metric();
  const auto& gi_field = frame.inverse_metric();
  const auto& h2 = frame.mean_curvature_norm2();
  const auto& a = frame.second_fundamental();

  // |H| for a spacelike or timelike mean curvature alike.
  GridField hn(frame.sample().domain, 0, 1);
  for (std::size_t k = 0; k < frame.nodes(); ++k) hn(k, 0) = std::sqrt(std::abs(h2(k, 0)));
  const GridField grad = mesh::gradient(hn, frame.options().order);

  PSpectralReport rep;
  rep.rank_tol = rank_tol;
  rep.min_rank = m;
  rep.max_rank = 0;
  rep.shrinker_sup = shrinker_residual(frame).stats.sup;
  rep.items_evaluated = rep.shrinker_sup <= shrinker_gate;
  if (!rep.items_evaluated) {
    rep.notice = "parallel-normal items skipped: shrinker residual " + std::to_string(rep.shrinker_sup) +
                 " exceeds " + std::to_string(shrinker_gate);
  }

  std::vector<double> grad_norm(frame.nodes(), 0.0);
  double grad_max = 0.0;
  for (std::size_t k = 0; k < frame.nodes(); ++k) {
    if (!frame.mask()[k]) continue;
    double s = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) s += gi_field(k, i2(m, i, j)) * grad(k, sz(i)) * grad(k, sz(j));
    grad_norm[k] = std::sqrt(std::max(0.0, s));
    grad_max = std::max(grad_max, grad_norm[k]);
  }

  const GridField p_up = geometry::raise_all(aux.p, gi_field);
  std::vector<double> v1(sz(n)), v2(sz(n));
  for (std::size_t k = 0; k < frame.nodes(); ++k) {
    if (!frame.mask()[k]) continue;
    auto gi = gi_field.node(k);
    const auto eig = geometry::generalized_symmetric_eigen(m, aux.p.node(k), g.node(k));
    int rank = 0;
    for (double lam : eig.values) {
      rep.sup_idempotency = std::max(rep.sup_idempotency, std::abs(lam * lam - lam));
      if (std::abs(lam) > rank_tol) ++rank;
    }
    rep.min_rank = std::min(rep.min_rank, rank);
    rep.max_rank = std::max(rep.max_rank, rank);
    double tr = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) tr += gi[i2(m, i, j)] * aux.p(k, i2(m, i, j));
    rep.sup_trace_defect = std::max(rep.sup_trace_defect, std::abs(tr - h2(k, 0)));
    rep.eigenvalues.push_back(eig.values);

    if (grad_norm[k] > std::max(grad_rel * grad_max, grad_abs)) {
      double dot = 0.0;
      for (int i = 0; i < m; ++i) dot += grad(k, sz(i)) * eig.vectors[0][sz(i)];
      const double cosine = std::abs(dot) / grad_norm[k];
      rep.min_alignment = rep.min_alignment ? std::min(*rep.min_alignment, cosine) : cosine;
      ++rep.aligned_nodes;
    }

    if (!rep.items_evaluated) continue;
    // Parallel-normal items.
    double p2 = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) p2 += aux.p(k, i2(m, i, j)) * p_up(k, i2(m, i, j));
    std::fill(v1.begin(), v1.end(), 0.0);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        auto aij = a.value(k, i2(m, i, j));
        for (int c = 0; c < n; ++c) v1[sz(c)] += p_up(k, i2(m, i, j)) * aij[sz(c)];
      }
    const double ratio = p2 / h2(k, 0);
    for (int c = 0; c < n; ++c) v2[sz(c)] = v1[sz(c)] - ratio * frame.mean_curvature()(k, sz(c));
    rep.item1 = std::max(rep.item1, ambient::euclidean_norm(v2));
    rep.item2 = std::max(rep.item2, std::abs(ambient::norm2(sig, v1) - p2 * ratio));
    // P_i^k = g^{ka} P_ai (mixed, symmetric P).
    std::vector<double> pmix(sz(m * m), 0.0);
    for (int i = 0; i < m; ++i)
      for (int kk = 0; kk < m; ++kk)
        for (int b = 0; b < m; ++b) pmix[i2(m, i, kk)] += gi[i2(m, kk, b)] * aux.p(k, i2(m, b, i));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        std::fill(v2.begin(), v2.end(), 0.0);
        for (int kk = 0; kk < m; ++kk) {
          auto akj = a.value(k, i2(m, kk, j));
          auto aki = a.value(k, i2(m, kk, i));
          for (int c = 0; c < n; ++c)
            v2[sz(c)] += pmix[i2(m, i, kk)] * akj[sz(c)] - pmix[i2(m, j, kk)] * aki[sz(c)];
        }
        rep.item3 = std::max(rep.item3, ambient::euclidean_norm(v2));
      }
    double lhs4 = 0.0;
    double rhs4 = 0.0;
    for (int i = 0; i < m; ++i)
      for (int kk = 0; kk < m; ++kk)
        for (int l = 0; l < m; ++l) {
          for (int j = 0; j < m; ++j)
            lhs4 += aux.s(k, i4(m, i, kk, j, l)) * p_up(k, i2(m, i, j)) * p_up(k, i2(m, kk, l));
          rhs4 += aux.q(k, i2(m, i, l)) * pmix[i2(m, kk, i)] * p_up(k, i2(m, kk, l));
        }
    rep.item4 = std::max(rep.item4, std::abs(lhs4 - rhs4));
  }
  if (rep.eigenvalues.empty()) rep.min_rank = 0;
  return rep;
}

BoundedGeometryReport bounded_geometry_report(const Frame& frame, int max_order) {
  const int m = frame.dim();
  const int n = frame.signature().dim();
  const auto& sig = frame.signature();
  const auto& dom = frame.sample().domain;
  const int depth = geometry::effective_mask_width(dom, frame.options()) / mesh::stencil_half_width(frame.options().order);
  if (max_order < 0 || (!dom.fully_periodic() && max_order + 2 > depth)) {
    throw UsageError("bounded_geometry_report: derivative order " + std::to_string(max_order) +
                     " exceeds the available stencil depth " + std::to_string(std::max(depth - 2, 0)));
  }
  BoundedGeometryReport rep;
  rep.max_order = max_order;
  GridField cur = frame.second_fundamental();
  for (int order = 0; order <= max_order; ++order) {
    if (order > 0) cur = geometry::covariant_derivative(cur, frame.christoffel(), frame.options().order);
    GridField plus = cur;
    GridField minus = cur;
    for (std::size_t k = 0; k < frame.nodes(); ++k)
      for (std::size_t t = 0; t < cur.tuples(); ++t)
        for (int c = 0; c < n; ++c) {
          if (sig.is_timelike_axis(c)) plus.value(k, t)[sz(c)] = 0.0;
          else minus.value(k, t)[sz(c)] = 0.0;
        }
    const GridField cp = geometry::full_contraction(plus, plus, frame.inverse_metric(), ambient::Signature(0, n));
    const GridField cm = geometry::full_contraction(minus, minus, frame.inverse_metric(), sig);
    double cs = 0.0;
    double ds = 0.0;
    for (std::size_t k = 0; k < frame.nodes(); ++k) {
      if (!frame.mask()[k]) continue;
      cs = std::max(cs, cp(k, 0));
      ds = std::max(ds, -cm(k, 0));
    }
    rep.c.push_back(cs);
    rep.d.push_back(ds);
  }

  const auto& h2 = frame.mean_curvature_norm2();
  double sup_inv = 0.0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < frame.nodes(); ++k) {
    if (!frame.mask()[k]) continue;
    const double hh = std::abs(h2(k, 0));
    if (hh < frame.options().tau_h) {
      rep.mean_curvature_defined = false;
      continue;
    }
    const double inv = 1.0 / std::sqrt(hh);
    sup_inv = std::max(sup_inv, inv);
    const double x = std::log1p(std::abs(ambient::norm2(sig, frame.positions().value(k, 0))));
    const double y = std::log(inv);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (rep.mean_curvature_defined && count > 0) {
    rep.sup_inverse_h = sup_inv;
    const double cnt = static_cast<double>(count);
    const double var = sxx - sx * sx / cnt;
    rep.growth_exponent = var > 1e-14 * std::max(1.0, sxx) ? (sxy - sx * sy / cnt) / var : 0.0;
  }

  // Inverse-Lipschitz ratio over a fixed sample of interior nodes.
  std::vector<std::size_t> picks;
  const std::size_t total = frame.mask().count;
  const std::size_t want = std::min<std::size_t>(64, total);
  if (want > 0) {
    const std::size_t step = std::max<std::size_t>(1, total / want);
    std::size_t seen = 0;
    for (std::size_t k = 0; k < frame.nodes() && picks.size() < want; ++k) {
      if (!frame.mask()[k]) continue;
      if (seen++ % step == 0) picks.push_back(k);
    }
  }
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> diff(sz(n));
  for (std::size_t a = 0; a < picks.size(); ++a)
    for (std::size_t b = a + 1; b < picks.size(); ++b) {
      const auto xa = dom.coordinates(picks[a]);
      const auto xb = dom.coordinates(picks[b]);
      double d2 = 0.0;
      for (int ax = 0; ax < m; ++ax) {
        double dx = std::abs(xa[sz(ax)] - xb[sz(ax)]);
        if (dom.axis(ax).periodic) dx = std::min(dx, (dom.axis(ax).hi - dom.axis(ax).lo) - dx);
        d2 += dx * dx;
      }
      if (d2 == 0.0) continue;
      auto fa = frame.positions().value(picks[a], 0);
      auto fb = frame.positions().value(picks[b], 0);
      for (int c = 0; c < n; ++c) diff[sz(c)] = fa[sz(c)] - fb[sz(c)];
      best = std::min(best, ambient::euclidean_norm(diff) / std::sqrt(d2));
      ++rep.sampled_pairs;
    }
  rep.inverse_lipschitz = rep.sampled_pairs ? best : 0.0;
  return rep;
}

bool ConvergenceStudy::satisfied(double required) const {
  if (rows.empty()) return false;
  if (rows.back().sup <= floor) return true;
  if (!min_order) return false;
  return *min_order >= required;
}

ConvergenceStudy convergence_study(const std::string& name, std::span<const int> resolutions,
                                   const SampleFactory& make, const Evaluator& eval,
                                   const geometry::GeometryOptions& opt, double floor) {
  ConvergenceStudy study;
  study.name = name;
  study.floor = floor;
  std::vector<double> margin;
  for (int res : resolutions) {
    const ImmersionSample sample = make(res);
    const Frame frame(sample, opt);
    const Residual r = eval(frame);
    const auto& dom = sample.domain;
    if (margin.empty()) {
      // The coarsest grid fixes the physical region compared across levels.
      const int width = geometry::effective_mask_width(dom, opt);
      for (int a = 0; a < dom.dim(); ++a) margin.push_back(width * dom.spacing(a));
    }
    const auto region = mesh::intersect(frame.mask(), mesh::margin_mask(dom, margin));
    if (region.degenerate) throw UsageError("convergence_study: empty comparison region at resolution " + std::to_string(res));
    const auto stats = mesh::masked_stats(r.field.data(), region);
    ConvergenceRow row;
    row.resolution = res;
    row.h = dom.spacing(0);
    row.sup = stats.sup;
    row.mean = stats.mean;
    if (!study.rows.empty()) {
      const auto& prev = study.rows.back();
      if (prev.sup > floor && row.sup > 0.0) {
        row.order = std::log(prev.sup / row.sup) / std::log(prev.h / row.h);
        study.min_order = study.min_order ? std::min(*study.min_order, *row.order) : *row.order;
      }
    }
    study.rows.push_back(row);
  }
  return study;
}

const std::vector<std::string>& identity_names() {
  static const std::vector<std::string> names = {"gauss",        "codazzi",       "ricci_normal",
                                                  "simons",       "laplace_normF", "laplace_normH",
                                                  "shrinker",     "parallel_principal_normal"};
  return names;
}

Residual evaluate_identity(const std::string& name, const Frame& frame) {
  if (name == "gauss") return gauss_residual(frame, frame.aux());
  if (name == "codazzi") return codazzi_residual(frame);
  if (name == "ricci_normal") return ricci_normal_residual(frame);
  if (name == "simons") return simons_residual(frame, frame.aux());
  if (name == "laplace_normF") return laplace_normF_residual(frame);
  if (name == "laplace_normH") return laplace_normH_residual(frame, frame.aux());
  if (name == "shrinker") return shrinker_residual(frame);
  if (name == "parallel_principal_normal") return parallel_principal_normal_residual(frame);
  throw UsageError("unknown identity '" + name + "'");
}

}  // namespace pseudomcf::identities
