#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "limitalg/intertwine.hpp"
#include "test_support.hpp"

using namespace limitalg;
using support::Rng;

namespace {

template <class F>
Error catch_error(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected an Error");
  throw;
}

// Exact commutation of the corrected diagram, checked on dense images.
double dense_triangle_residual(const CrossoverDiagram& d, const CorrectedDiagram& c) {
  double worst = 0.0;
  auto check = [&](const StandardRegularMap& outer, const StandardRegularMap& inner,
                   const StandardRegularMap& conn) {
    auto comp = compose(outer, inner);
    for (const Edge& e : inner.source()->edges())
      worst = std::max(worst, (support::dense_image(comp, e.from, e.to) -
                               support::dense_image(conn, e.from, e.to))
                                  .cwiseAbs()
                                  .maxCoeff());
  };
  for (std::size_t k = 0; k < c.betas.size(); ++k) {
    check(c.betas[k], c.alphas[k], composite(d.top, d.n[k], d.n[k + 1]));
    if (k + 1 < c.alphas.size())
      check(c.alphas[k + 1], c.betas[k], composite(d.bottom, d.m[k], d.m[k + 1]));
  }
  return worst;
}

CrossoverDiagram untwisted(int stages) {
  CrossoverDiagram d;
  d.top = tr_refinement_system(2, stages);
  d.bottom = d.top;
  for (int k = 0; k < stages; ++k) {
    d.n.push_back(k);
    d.m.push_back(k);
    d.alphas.push_back(identity_map(d.top.stages[k]));
    if (k + 1 < stages) d.betas.push_back(d.top.connectors[k]);
  }
  return d;
}

}  // namespace

TEST_CASE("standard diagrams need no correction") {
  auto d = untwisted(4);
  auto rep = verify_diagram(d);
  CHECK(rep.max_residual == 0.0);
  for (const auto& c : rep.crossovers) {
    CHECK(c.maps_diagonal);
    CHECK(c.normalizing);
  }
  auto c = exact_intertwine(d);
  for (const auto& u : c.v_hat) CHECK(is_identity(u));
  for (const auto& u : c.u_hat) CHECK(is_identity(u));
}

TEST_CASE("twisted diagrams are corrected exactly") {
  Rng rng(0x17e701);
  for (bool numeric : {false, true}) {
    // Quarter phases keep standard arithmetic exact in floating point.
    auto d = support::twisted_refinement_diagram(
        rng, 2, 5, numeric, numeric ? support::Phases::Any : support::Phases::Quarter);
    CHECK(verify_diagram(d).max_residual <= 1e-9);
    auto c = exact_intertwine(d);
    const double tol = numeric ? 1e-12 : 0.0;
    CHECK(c.report.max_residual <= tol);
    CHECK(c.report.residual_sum <= 10 * tol);
    CHECK(dense_triangle_residual(d, c) <= tol);
    for (const auto& x : c.report.crossovers) CHECK((x.maps_diagonal && x.normalizing));

    // α̂_k = Ad(V̂_k) ∘ α_k on every matrix unit.
    for (std::size_t k = 0; k < c.alphas.size(); ++k) {
      auto lhs = support::conjugated(to_dense(c.v_hat[k]), as_numeric(d.alphas[k]));
      CHECK(support::unit_distance(lhs, to_numeric(c.alphas[k])) <= 1e-9);
    }
    for (std::size_t k = 0; k < c.betas.size(); ++k) {
      auto lhs = support::conjugated(to_dense(c.u_hat[k]), as_numeric(d.betas[k]));
      CHECK(support::unit_distance(lhs, to_numeric(c.betas[k])) <= 1e-9);
    }

    auto again = exact_intertwine(corrected_diagram(d, c));
    for (const auto& u : again.v_hat) CHECK(is_identity(u));
    for (const auto& u : again.u_hat) CHECK(is_identity(u));
  }
}

TEST_CASE("broken triangles are reported with their crossover") {
  auto d = untwisted(3);
  // β_1 moved to a different, still regular, map.
  auto swap = StandardPartialIsometry(4, {1, 0, 2, 3});
  d.betas[0] = conjugate(swap, std::get<StandardRegularMap>(d.betas[0]));
  auto rep = verify_diagram(d);
  CHECK(rep.max_residual > 0.0);
  Error e = catch_error([&] { exact_intertwine(d); });
  CHECK(e.code() == ErrorCode::TriangleNotCommuting);
  CHECK(e.witness() == std::vector<long>{2});
}

TEST_CASE("approximate diagrams") {
  Rng rng(0x17e702);
  auto d = support::twisted_refinement_diagram(rng, 2, 4, true);
  d.mode = DiagramMode::Approximate;
  auto exact = exact_intertwine(d);

  auto perturbed = d;
  for (std::size_t k = 1; k < perturbed.alphas.size(); ++k) {
    auto n = as_numeric(perturbed.alphas[k]);
    Matrix u = support::exp_i(support::random_block_hermitian(rng, *n.target()), 1e-3);
    perturbed.alphas[k] = support::conjugated(u, n);
  }
  auto before = verify_diagram(perturbed);
  CHECK(before.max_residual > 1e-6);
  CHECK(before.max_residual < 0.05);
  auto c = approx_intertwine(perturbed);
  CHECK(c.report.max_residual <= 1e-9);
  for (std::size_t k = 0; k < c.alphas.size(); ++k)
    CHECK(conjugacy_class(c.alphas[k]) == conjugacy_class(exact.alphas[k]));

  auto far = d;
  auto n = as_numeric(far.alphas[1]);
  far.alphas[1] = support::conjugated(
      support::exp_i(support::random_block_hermitian(rng, *n.target()), 1.5), n);
  Error e = catch_error([&] { approx_intertwine(far); });
  CHECK(e.code() == ErrorCode::ResidualTooLarge);
  CHECK(e.witness() == std::vector<long>{3});
}

TEST_CASE("masa flags") {
  Rng rng(0x17e703);
  auto d = support::twisted_refinement_diagram(rng, 2, 3, true);
  auto rep = verify_diagram(d);
  bool any_flagged = false;
  for (const auto& c : rep.crossovers)
    if (!c.normalizing) {
      any_flagged = true;
      CHECK(c.witness.has_value());
    }
  CHECK(any_flagged);
}

TEST_CASE("budgets") {
  auto d = untwisted(3);
  d.budgets = {0.0, 0.0, 0.0};
  auto rep = verify_diagram(d);
  CHECK(rep.within_budgets);
  REQUIRE(rep.triangles.size() == 4);
  CHECK(rep.triangles[0].budget.has_value());
}

TEST_CASE("shape checks") {
  auto d = untwisted(3);
  d.betas.pop_back();
  d.betas.pop_back();
  CHECK(catch_error([&] { check_diagram(d); }).code() == ErrorCode::ShapeMismatch);
}
