#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "pseudomcf/errors.hpp"
#include "pseudomcf/mesh.hpp"
#include "support.hpp"

using namespace pseudomcf;
using namespace pseudomcf::mesh;

namespace {

constexpr double kPi = std::numbers::pi;

// Finite-difference weights on arbitrary nodes (Fornberg 1988), evaluated at 0.
std::vector<double> fornberg(int derivative, const std::vector<double>& x) {
  const int n = static_cast<int>(x.size()) - 1;
  std::vector<std::vector<std::vector<double>>> c(
      static_cast<std::size_t>(derivative + 1),
      std::vector<std::vector<double>>(static_cast<std::size_t>(n + 1), std::vector<double>(static_cast<std::size_t>(n + 1), 0.0)));
  auto at = [&](int m, int i, int j) -> double& {
    return c[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  };
  at(0, 0, 0) = 1.0;
  double c1 = 1.0;
  for (int i = 1; i <= n; ++i) {
    double c2 = 1.0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)];
      c2 *= c3;
      for (int m = 0; m <= std::min(i, derivative); ++m) {
        at(m, i, j) = (x[static_cast<std::size_t>(i)] * at(m, i - 1, j) - (m > 0 ? m * at(m - 1, i - 1, j) : 0.0)) / c3;
      }
    }
    for (int m = 0; m <= std::min(i, derivative); ++m) {
      at(m, i, i) = c1 / c2 *
                    ((m > 0 ? m * at(m - 1, i - 1, i - 1) : 0.0) - x[static_cast<std::size_t>(i - 1)] * at(m, i - 1, i - 1));
    }
    c1 = c2;
  }
  std::vector<double> w(static_cast<std::size_t>(n + 1));
  for (int j = 0; j <= n; ++j) w[static_cast<std::size_t>(j)] = at(derivative, n, j);
  return w;
}

ParamDomain periodic_line(int n) { return ParamDomain({{0.0, 2 * kPi, n, true}}); }

GridField sample1(const ParamDomain& dom, double (*f)(double)) {
  return build_grid(dom, 1, [f](std::span<const double> p) { return std::vector<double>{f(p[0])}; });
}

double sup_error(const GridField& a, double (*f)(double)) {
  double e = 0.0;
  for (std::size_t k = 0; k < a.nodes(); ++k) e = std::max(e, std::abs(a(k, 0) - f(a.domain().coordinate(0, static_cast<int>(k)))));
  return e;
}

double neg_sin(double x) { return -std::sin(x); }

}  // namespace

TEST_CASE("domain validation and geometry") {
  CHECK_THROWS_AS(ParamDomain({}), UsageError);
  CHECK_THROWS_AS(ParamDomain({{0.0, 1.0, 7, false}}), UsageError);
  CHECK_THROWS_AS(ParamDomain({{1.0, 1.0, 8, false}}), UsageError);
  const ParamDomain d({{0.0, 1.0, 11, false}, {0.0, 2 * kPi, 8, true}});
  CHECK(d.node_count() == 88);
  CHECK(d.spacing(0) == doctest::Approx(0.1));
  CHECK(d.spacing(1) == doctest::Approx(2 * kPi / 8));
  CHECK(d.coordinate(0, 10) == doctest::Approx(1.0));
  CHECK_FALSE(d.fully_periodic());
  for (std::size_t k = 0; k < d.node_count(); ++k) {
    const auto mi = d.multi_index(k);
    CHECK(d.index_along(k, 0) == mi[0]);
    CHECK(mi[0] * static_cast<int>(d.stride(0)) + mi[1] * static_cast<int>(d.stride(1)) == static_cast<int>(k));
  }
}

TEST_CASE("build_grid examples") {
  const auto circle = build_grid(periodic_line(8), 2, [](std::span<const double> p) {
    return std::vector<double>{std::cos(p[0]), std::sin(p[0])};
  });
  CHECK(circle.nodes() == 8);
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(circle(k, 0) * circle(k, 0) + circle(k, 1) * circle(k, 1) == doctest::Approx(1.0));
  }
  const ParamDomain torus({{0.0, 2 * kPi, 16, true}, {0.0, 2 * kPi, 16, true}});
  const auto t = build_grid(torus, 4, [](std::span<const double> p) {
    return std::vector<double>{std::cos(p[0]), std::sin(p[0]), std::cos(p[1]), std::sin(p[1])};
  });
  CHECK(t.nodes() == 256);
  for (std::size_t k = 0; k < t.nodes(); ++k) {
    const auto v = t.value(k, 0);
    CHECK(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3] == doctest::Approx(2.0));
  }
  const ParamDomain patch({{0.1, 1.0, 9, false}, {0.0, 2 * kPi, 12, true}});
  const auto h = build_grid(patch, 3, [](std::span<const double> p) {
    return std::vector<double>{std::cosh(p[0]), std::sinh(p[0]) * std::cos(p[1]), std::sinh(p[0]) * std::sin(p[1])};
  });
  for (std::size_t k = 0; k < h.nodes(); ++k) {
    const auto v = h.value(k, 0);
    CHECK(-v[0] * v[0] + v[1] * v[1] + v[2] * v[2] == doctest::Approx(-1.0));
  }
  CHECK_THROWS_AS(build_grid(patch, 2, [](std::span<const double>) { return std::vector<double>{1.0}; }), UsageError);
  CHECK_THROWS_AS(build_grid(patch, 1, [](std::span<const double>) { return std::vector<double>{NAN}; }), UsageError);
}

TEST_CASE("stencil weights match the Fornberg oracle") {
  for (int order : {2, 4}) {
    const int hw = stencil_half_width(order);
    for (int d : {1, 2}) {
      for (int from_left = 0; from_left <= hw; ++from_left) {
        const auto row = stencil_row(d, order, from_left);
        std::vector<double> x;
        for (std::size_t j = 0; j < row.weights.size(); ++j) x.push_back(row.first + static_cast<int>(j));
        const auto oracle = fornberg(d, x);
        for (std::size_t j = 0; j < x.size(); ++j) {
          CHECK(static_cast<double>(row.weights[j]) / static_cast<double>(row.denominator) ==
                doctest::Approx(oracle[j]).epsilon(1e-12).scale(1.0));
        }
        // Rows are exact on polynomials of degree order + d - 1.
        for (int p = 0; p <= order + d - 1; ++p) {
          double s = 0.0;
          for (std::size_t j = 0; j < x.size(); ++j) s += static_cast<double>(row.weights[j]) * std::pow(x[j], p);
          const double exact = p == d ? (d == 1 ? 1.0 : 2.0) : 0.0;
          CHECK(s / static_cast<double>(row.denominator) == doctest::Approx(exact).scale(1.0));
        }
      }
    }
  }
  CHECK_THROWS_AS(stencil_half_width(3), UsageError);
}

TEST_CASE("partial derivative examples") {
  const auto dom = periodic_line(32);
  auto constant = sample1(dom, [](double) { return 3.0; });
  const auto dconst = partial(constant, 0);
  for (double v : dconst.data()) CHECK(v == 0.0);

  // Fourth-order convergence of d/dx sin on a periodic axis.
  std::vector<double> err;
  for (int n : {16, 32, 64}) {
    const auto f = sample1(periodic_line(n), [](double x) { return std::sin(x); });
    err.push_back(sup_error(partial(f, 0, 4), [](double x) { return std::cos(x); }));
  }
  CHECK(std::log2(err[0] / err[1]) > 3.8);
  CHECK(std::log2(err[1] / err[2]) > 3.8);
  const auto f2 = sample1(periodic_line(64), [](double x) { return std::sin(x); });
  const double e2a = sup_error(partial(f2, 0, 2), [](double x) { return std::cos(x); });
  const auto f2b = sample1(periodic_line(128), [](double x) { return std::sin(x); });
  const double e2b = sup_error(partial(f2b, 0, 2), [](double x) { return std::cos(x); });
  CHECK(std::log2(e2a / e2b) == doctest::Approx(2.0).epsilon(0.05));

  const auto sec = second_partial(f2, 0, 4);
  CHECK(sup_error(sec, neg_sin) < 1e-5);

  // Linear field on a patch: exact slope at every node, boundaries included.
  const ParamDomain patch({{-1.0, 2.0, 13, false}});
  const auto lin = build_grid(patch, 1, [](std::span<const double> p) { return std::vector<double>{3.0 * p[0] - 1.0}; });
  for (int order : {2, 4}) {
    const auto dl = partial(lin, 0, order);
    for (double v : dl.data()) CHECK(v == doctest::Approx(3.0).epsilon(1e-13));
  }
  // Cubic on a patch at order 4: one-sided rows are exact as well.
  const auto cub = build_grid(patch, 1, [](std::span<const double> p) { return std::vector<double>{p[0] * p[0] * p[0]}; });
  const auto dc = partial(cub, 0, 4);
  for (std::size_t k = 0; k < dc.nodes(); ++k) {
    const double x = patch.coordinate(0, static_cast<int>(k));
    CHECK(dc(k, 0) == doctest::Approx(3 * x * x).scale(1.0).epsilon(1e-12));
  }
}

TEST_CASE("gradient and hessian shapes and symmetry") {
  const ParamDomain dom({{0.0, 2 * kPi, 16, true}, {0.0, 1.0, 12, false}});
  const auto f = build_grid(dom, 2, [](std::span<const double> p) {
    return std::vector<double>{std::sin(p[0]) * p[1] * p[1], std::cos(p[0]) + p[1]};
  });
  const auto g = gradient(f);
  CHECK(g.rank() == 1);
  CHECK(g.width() == 2);
  const auto h = hessian(f);
  CHECK(h.rank() == 2);
  for (std::size_t k = 0; k < h.nodes(); ++k) {
    for (int c = 0; c < 2; ++c) CHECK(h(k, 1 * 2 + c) == h(k, 2 * 2 + c));
  }
  // Mixed entry: d/du d/dv sin(u) v^2 = 2 v cos(u).
  const auto mask = interior_mask(dom, 4);
  for (std::size_t k = 0; k < h.nodes(); ++k) {
    if (!mask[k]) continue;
    const auto c = dom.coordinates(k);
    CHECK(h(k, 2) == doctest::Approx(2 * c[1] * std::cos(c[0])).epsilon(1e-3).scale(1.0));
  }
}

TEST_CASE("interior mask examples") {
  const ParamDomain torus({{0.0, 1.0, 8, true}, {0.0, 1.0, 8, true}});
  const auto full = interior_mask(torus, 3);
  CHECK(full.count == 64);
  const ParamDomain line({{0.0, 1.0, 16, false}});
  CHECK(interior_mask(line, 2).count == 12);
  const auto empty = interior_mask(line, 8);
  CHECK(empty.count == 0);
  CHECK(empty.degenerate);

  const double margin[] = {0.25};
  const auto mm = margin_mask(line, margin);
  for (std::size_t k = 0; k < line.node_count(); ++k) {
    const double x = line.coordinate(0, static_cast<int>(k));
    CHECK(mm[k] == (x >= 0.25 - 1e-12 && x <= 0.75 + 1e-12));
  }
  const auto both = intersect(mm, interior_mask(line, 5));
  CHECK(both.count == std::min(mm.count, interior_mask(line, 5).count));
}

TEST_CASE("masked statistics") {
  const ParamDomain line({{0.0, 1.0, 10, false}});
  std::vector<double> v(10);
  for (int i = 0; i < 10; ++i) v[static_cast<std::size_t>(i)] = i;
  const auto st = masked_stats(v, interior_mask(line, 2));
  CHECK(st.sup == 7.0);
  CHECK(st.mean == doctest::Approx(4.5));
  CHECK(st.count == 6);
}

TEST_CASE("csv output is locale independent with a header") {
  const ParamDomain line({{0.0, 1.0, 8, false}});
  const auto f = build_grid(line, 1, [](std::span<const double> p) { return std::vector<double>{0.5 + p[0]}; });
  std::ostringstream out;
  write_csv(out, f, {"value"});
  const std::string text = out.str();
  CHECK(text.rfind("x0,value\n", 0) == 0);
  CHECK(text.find("0.5") != std::string::npos);
  CHECK(text.find(';') == std::string::npos);
  int lines = 0;
  for (char ch : text) lines += ch == '\n';
  CHECK(lines == 9);
}

TEST_CASE("periodic partial commutes with cyclic shifts") {
  testing::Gen gen(21);
  for (int c = 0; c < 50; ++c) {
    const int n = gen.integer(8, 40);
    const int shift = gen.integer(1, n - 1);
    const auto dom = periodic_line(n);
    GridField f(dom, 0, 1);
    for (auto& x : f.data()) x = gen.uniform(-1, 1);
    GridField g(dom, 0, 1);
    for (int i = 0; i < n; ++i) g(static_cast<std::size_t>((i + shift) % n), 0) = f(static_cast<std::size_t>(i), 0);
    const auto df = partial(f, 0);
    const auto dg = partial(g, 0);
    for (int i = 0; i < n; ++i) {
      CHECK(dg(static_cast<std::size_t>((i + shift) % n), 0) == df(static_cast<std::size_t>(i), 0));
    }
  }
}
