#include <doctest.h>

#include <cmath>

#include "pseudomcf/catalog.hpp"
#include "pseudomcf/errors.hpp"
#include "pseudomcf/identities.hpp"
#include "support.hpp"

using namespace pseudomcf;
using namespace pseudomcf::identities;
using ambient::Signature;

namespace {

double sup_of(const std::string& name, const geometry::ImmersionSample& s) {
  return evaluate_identity(name, Frame(s)).stats.sup;
}

ConvergenceStudy study(const std::string& name, const std::string& case_name, std::vector<int> ladder) {
  return convergence_study(
      name, ladder, [&](int n) { return catalog::build_case(case_name, n); },
      [&](const Frame& f) { return evaluate_identity(name, f); });
}

}  // namespace

TEST_CASE("affine plane: every residual vanishes exactly") {
  const Frame f(catalog::affine_plane());
  const auto aux = f.aux();
  CHECK(gauss_residual(f, aux).stats.sup == 0.0);
  CHECK(codazzi_residual(f).stats.sup == 0.0);
  CHECK(ricci_normal_residual(f).stats.sup == 0.0);
  CHECK(simons_residual(f, aux).stats.sup == 0.0);
  CHECK(laplace_normF_residual(f).stats.sup == 0.0);
  CHECK(laplace_normH_residual(f, aux).stats.sup == 0.0);
  CHECK(shrinker_residual(f).stats.sup == 0.0);
  CHECK_THROWS_AS(parallel_principal_normal_residual(f), NullMeanCurvatureError);
}

TEST_CASE("flat and hypersurface cases") {
  const auto torus = catalog::clifford_torus(32);
  CHECK(sup_of("codazzi", torus) < 1e-12);
  CHECK(sup_of("ricci_normal", torus) < 1e-12);
  CHECK(sup_of("gauss", torus) < 1e-12);
  CHECK(sup_of("shrinker", catalog::circle(64)) < 1e-12);
  CHECK(sup_of("ricci_normal", catalog::sphere(2, Signature(0, 3), 128)) < 1e-5);
  CHECK(sup_of("ricci_normal", catalog::circle(64)) < 1e-12);
}

TEST_CASE("codimension zero skips the normal curvature") {
  const mesh::ParamDomain dom({{0.0, 1.0, 12, false}, {0.0, 1.0, 12, false}});
  const auto open = geometry::sample_chart(dom, Signature(0, 2), [](std::span<const double> x) {
    return std::vector<double>{x[0] + 0.1 * x[1] * x[1], x[1]};
  });
  const auto r = ricci_normal_residual(Frame(open, {4, 1e-10, 1e-8, 2}));
  CHECK(r.skipped);
  CHECK_FALSE(r.notice.empty());
}

TEST_CASE("convergence on curved cases") {
  const auto g = study("gauss", "sphere_m2", {64, 128});
  REQUIRE(g.min_order);
  CHECK(*g.min_order >= 3.0);
  const auto c = study("codazzi", "sphere_m2", {64, 128});
  CHECK(c.satisfied(3.0));
  const auto rn = study("ricci_normal", "twisted_torus", {16, 32, 64});
  CHECK(rn.rows.back().sup < rn.rows.front().sup);
  CHECK(rn.satisfied(2.0));
  const auto lf = study("laplace_normF", "hyperbolic_expander", {24, 32, 48});
  CHECK(lf.satisfied(2.0));
  const auto hg = study("gauss", "hyperbolic_expander", {24, 32, 48});
  CHECK(hg.satisfied(2.0));
}

TEST_CASE("convergence floor rule") {
  ConvergenceStudy s;
  s.rows = {{16, 0.1, 1e-12, 1e-13, std::nullopt}, {32, 0.05, 2e-12, 1e-13, std::nullopt}};
  CHECK(s.satisfied(3.0));
  ConvergenceStudy t;
  t.rows = {{16, 0.1, 1e-4, 0, std::nullopt}, {32, 0.05, 1e-5, 0, std::log2(10.0)}};
  t.min_order = std::log2(10.0);
  CHECK(t.satisfied(3.0));
  CHECK_FALSE(t.satisfied(3.5));
}

TEST_CASE("shrinker residual of the hyperbolic expander is at least 3") {
  const Frame f(catalog::hyperbolic_expander(1.0, 48));
  const auto r = shrinker_residual(f);
  double lo = 1e300;
  for (std::size_t k = 0; k < f.nodes(); ++k) {
    if (!f.mask()[k]) continue;
    lo = std::min(lo, r.field(k, 0));
    const double fe = ambient::euclidean_norm(f.positions().value(k, 0));
    CHECK(r.field(k, 0) == doctest::Approx(3.0 * fe).epsilon(1e-6));
  }
  CHECK(lo >= 3.0 - 1e-3);
}

TEST_CASE("laplacian of |H|^2") {
  CHECK(sup_of("laplace_normH", catalog::build_case("cylinder", 64)) < 1e-10);
  const Frame pc(catalog::perturbed_cylinder(64));
  CHECK_THROWS_AS(laplace_normH_residual(pc, pc.aux()), UsageError);
  const auto fit = fit_homothety(Frame(catalog::hyperbolic_expander(1.0, 32)));
  CHECK(fit.lambda == doctest::Approx(-2.0).epsilon(1e-6));
}

TEST_CASE("parallel principal normal") {
  CHECK(sup_of("parallel_principal_normal", catalog::build_case("cylinder", 64)) < 1e-10);
  CHECK(sup_of("parallel_principal_normal", catalog::sphere(2, Signature(0, 3), 128)) < 1e-5);
  CHECK(sup_of("parallel_principal_normal", catalog::perturbed_cylinder(64)) > 1e-2);
}

TEST_CASE("P spectral diagnostics") {
  SUBCASE("sphere") {
    const Frame f(catalog::sphere(2, Signature(0, 3), 128));
    const auto r = p_spectral_diagnostics(f, f.aux());
    for (const auto& ev : r.eigenvalues) {
      CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-5));
      CHECK(ev[1] == doctest::Approx(1.0).epsilon(1e-5));
    }
    CHECK(r.sup_idempotency < 1e-5);
    CHECK(r.min_rank == 2);
    REQUIRE(r.items_evaluated);
    CHECK(r.item1 < 1e-5);
    CHECK(r.item2 < 1e-5);
    CHECK(r.item3 < 1e-5);
    CHECK(r.item4 < 1e-5);
  }
  SUBCASE("items gated off a shrinker") {
    const Frame f(catalog::hyperbolic_expander(1.0, 24));
    const auto r = p_spectral_diagnostics(f, f.aux());
    CHECK_FALSE(r.items_evaluated);
    CHECK(r.shrinker_sup >= 3.0 - 1e-3);
    CHECK(r.item1 == 0.0);
    CHECK(r.item4 == 0.0);
    CHECK_FALSE(r.notice.empty());
    CHECK_FALSE(r.eigenvalues.empty());
  }
  SUBCASE("cylinder") {
    const Frame f(catalog::build_case("cylinder", 64));
    const auto r = p_spectral_diagnostics(f, f.aux());
    CHECK(r.min_rank == 1);
    CHECK(r.max_rank == 1);
    for (const auto& ev : r.eigenvalues) {
      CHECK(std::abs(ev[0] - 1.0) < 1e-6);
      CHECK(std::abs(ev[1]) < 1e-6);
    }
    CHECK(r.sup_trace_defect < 1e-12);
    CHECK(r.aligned_nodes == 0);
    REQUIRE(r.items_evaluated);
    CHECK(std::max({r.item1, r.item2, r.item3, r.item4}) < 1e-6);
  }
}

TEST_CASE("P eigenvalues do not depend on the parametrization") {
  testing::Gen gen(41);
  for (int c = 0; c < 6; ++c) {
    const int n = 8 * gen.integer(4, 10);
    const double half = gen.uniform(0.5, 3.0);
    const int count = gen.integer(17, 41);
    const auto s = catalog::cylinder_product(catalog::sphere(1, Signature(0, 3), n), {2}, half, count);
    const Frame f(s);
    const auto r = p_spectral_diagnostics(f, f.aux());
    for (const auto& ev : r.eigenvalues) {
      CHECK(std::abs(ev[0] - 1.0) < 1e-6);
      CHECK(std::abs(ev[1]) < 1e-6);
    }
  }
}

TEST_CASE("shrinker residual under ambient isometries") {
  testing::Gen gen(42);
  const auto base = catalog::sphere(2, Signature(1, 5), 64);
  const double r0 = shrinker_residual(Frame(base)).stats.sup;
  for (int c = 0; c < 6; ++c) {
    const auto rot = ambient::plane_rotation(5, gen.integer(1, 2), gen.integer(3, 4), gen.uniform(-3, 3));
    const auto map = ambient::compose(ambient::boost(5, 0, gen.integer(1, 4), gen.uniform(-1, 1)), rot);
    double frob = 0.0;
    for (double v : map.a) frob += v * v;
    auto moved = base;
    auto rotated = base;
    for (std::size_t k = 0; k < base.positions.nodes(); ++k) {
      map.apply(base.positions.value(k, 0), moved.positions.value(k, 0));
      rot.apply(base.positions.value(k, 0), rotated.positions.value(k, 0));
    }
    // Rotations preserve the Euclidean size of the residual vector; boosts
    // stretch it by at most their operator norm.
    CHECK(shrinker_residual(Frame(rotated)).stats.sup == doctest::Approx(r0).epsilon(1e-6));
    CHECK(shrinker_residual(Frame(moved)).stats.sup <= std::sqrt(frob) * r0 * (1 + 1e-6) + 1e-12);
  }
}

TEST_CASE("bounded geometry report") {
  const Frame plane(catalog::affine_plane());
  const auto r = bounded_geometry_report(plane, 1);
  CHECK_FALSE(r.mean_curvature_defined);
  CHECK_FALSE(r.sup_inverse_h);
  for (double v : r.c) CHECK(v == 0.0);
  for (double v : r.d) CHECK(v == 0.0);
  const Frame torus(catalog::clifford_torus(32));
  const auto t = bounded_geometry_report(torus, 2);
  CHECK(t.c[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(t.sup_inverse_h);
  CHECK(*t.sup_inverse_h == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
  CHECK(t.inverse_lipschitz > 0.0);
  CHECK_THROWS_AS(bounded_geometry_report(Frame(catalog::affine_plane(17)), 6), UsageError);
}

TEST_CASE("identity names") {
  const auto& names = identity_names();
  CHECK(names.size() == 8);
  CHECK(names.front() == "gauss");
  CHECK_THROWS_AS(evaluate_identity("nope", Frame(catalog::circle(16))), UsageError);
}
