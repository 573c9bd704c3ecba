#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "limitalg/conjugacy.hpp"
#include "test_support.hpp"

using namespace limitalg;
using support::Layout;
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

StandardProjection proj(std::vector<int> s) { return {std::move(s)}; }

// Conjugation checked densely, independent of the library's conjugate().
bool conjugates_exactly(const StandardPartialIsometry& v, const StandardRegularMap& a,
                        const StandardRegularMap& b) {
  Matrix dv = v.to_dense();
  for (const Edge& e : a.source()->edges()) {
    Matrix lhs = dv * support::dense_image(a, e.from, e.to) * dv.adjoint();
    if ((lhs - support::dense_image(b, e.from, e.to)).cwiseAbs().maxCoeff() > 1e-12)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("permutation intertwiner examples") {
  auto t3 = tr_algebra(3);
  std::vector<StandardProjection> p{proj({0}), proj({1})};
  CHECK(permutation_intertwiner(p, p, *t3).perm() == std::vector<int>{0, 1, 2});

  std::vector<StandardProjection> q{proj({1}), proj({0})};
  Error e = catch_error([&] { permutation_intertwiner(p, q, *t3); });
  CHECK(e.code() == ErrorCode::ProfileMismatch);
  CHECK(e.witness() == std::vector<long>{1, 1});

  auto t2m2 = tr_algebra(2, 2);
  std::vector<StandardProjection> a{proj({0})}, b{proj({1})};
  CHECK(permutation_intertwiner(a, b, *t2m2).perm() == std::vector<int>{1, 0, 2, 3});
}

TEST_CASE("class keys") {
  auto t3 = tr_algebra(3);
  auto key = conjugacy_class(identity_map(t3));
  CHECK(key.multiset == std::vector<IndexMap>{IndexMap{{0, 1, 2}}});

  auto sys = tr_refinement_system(2, 2);
  CHECK(conjugacy_class(sys.connectors[0]).multiset ==
        std::vector<IndexMap>(2, IndexMap{{0, 1}}));

  auto t2 = tr_algebra(2);
  auto t2m2 = tr_algebra(2, 2);
  auto x = assemble_regular(t2, t2m2, {validate_multiplicity_one({0, 2}, t2, t2m2)});
  auto y = assemble_regular(t2, t2m2, {validate_multiplicity_one({1, 3}, t2, t2m2)});
  CHECK(conjugacy_class(x) == conjugacy_class(y));
}

TEST_CASE("standard witnesses") {
  auto sys = tr_refinement_system(2, 2);
  const auto& phi = sys.connectors[0];
  CHECK(standard_witness(phi, phi).is_identity());

  auto t2 = tr_algebra(2);
  auto t2m2 = tr_algebra(2, 2);
  auto single = assemble_regular(t2, t2m2, {validate_multiplicity_one({0, 2}, t2, t2m2)});
  Error e = catch_error([&] { standard_witness(phi, single); });
  CHECK(e.code() == ErrorCode::NotInnerEquivalent);
}

TEST_CASE("triangle restandardization") {
  auto sys = tr_refinement_system(2, 3);
  const auto& phi1 = sys.connectors[0];
  const auto& phi2 = sys.connectors[1];
  auto theta = compose(phi2, phi1);
  auto r = restandardize_triangle(theta, phi1, CrossoverMap(phi2));
  CHECK(is_identity(r.unitary));
  CHECK(same_map(r.standard, phi2));

  Rng rng(0xc0471);
  auto w = support::random_standard_unitary(rng, *phi2.target(), support::Phases::Any);
  auto bad = conjugate(w, phi2);
  if (!same_map(compose(bad, phi1), theta)) {
    Error e = catch_error([&] { restandardize_triangle(theta, phi1, CrossoverMap(bad)); });
    CHECK(e.code() == ErrorCode::TriangleNotCommuting);
    CHECK(e.residual() > 0);
  }
}

TEST_CASE("property: intertwiners transport projections exactly") {
  Rng rng(0xc0472);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = support::uniform(rng, 1, 8);
    auto a = support::random_digraph_algebra(rng, n);
    std::vector<int> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<StandardProjection> p(support::uniform(rng, 0, 4));
    for (int i : pool) {
      const int j = support::uniform(rng, -1, static_cast<int>(p.size()) - 1);
      if (j >= 0) p[j].support.push_back(i);
    }
    for (auto& x : p) std::sort(x.support.begin(), x.support.end());
    auto sigma = support::block_permutation(rng, *a);
    std::vector<StandardProjection> q;
    for (const auto& x : p) {
      StandardProjection y;
      for (int i : x.support) y.support.push_back(sigma[i]);
      std::sort(y.support.begin(), y.support.end());
      q.push_back(y);
    }
    auto u = permutation_intertwiner(p, q, *a);
    for (std::size_t j = 0; j < p.size(); ++j) {
      std::vector<int> pulled;
      for (int i : q[j].support) pulled.push_back(u(i));
      std::sort(pulled.begin(), pulled.end());
      CHECK(pulled == p[j].support);
    }
    for (int i = 0; i < n; ++i) CHECK(a->block_of(u(i)) == a->block_of(i));
  }
}

TEST_CASE("property: witnesses recover random twists") {
  Rng rng(0xc0473);
  for (int trial = 0; trial < 200; ++trial) {
    const int r = support::uniform(rng, 1, 3);
    Layout S = support::tr_layout(r, {1});
    if (support::coin(rng, 0.3)) S.bands.push_back(std::vector<int>(r, 1));
    Layout T = support::tr_layout(r, {support::uniform(rng, 1, 3)});
    if (support::coin(rng, 0.3)) T.bands.push_back(std::vector<int>(r, 2));
    auto sa = support::layout_algebra(S), ta = support::layout_algebra(T);
    auto g = support::random_layout_map(rng, S, T, sa, ta, 3, support::Phases::Any);
    auto w = support::random_standard_unitary(rng, *ta, support::Phases::Any);
    auto twisted = conjugate(w, g.map);
    CHECK(conjugates_exactly(w, g.map, twisted));
    CHECK(conjugacy_class(twisted) == conjugacy_class(g.map));
    auto v = standard_witness(g.map, twisted);
    CHECK(v.is_unitary());
    CHECK(is_normalizing(v, *ta));
    CHECK(conjugates_exactly(v, g.map, twisted));
  }
}

TEST_CASE("property: class keys agree with brute-force inner equivalence") {
  Rng rng(0xc0474);
  int equivalent = 0, inequivalent = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const int r = support::uniform(rng, 1, 2);
    Layout S = support::tr_layout(r, {1});
    Layout T;
    if (r == 1) {
      T.bands = {{support::uniform(rng, 1, 3)}, {support::uniform(rng, 1, 2)}};
    } else {
      T = support::tr_layout(2, {support::uniform(rng, 1, 2)});
      if (support::coin(rng)) T.bands[0][1] = 1;
    }
    if (T.size() > 5) continue;
    auto sa = support::layout_algebra(S), ta = support::layout_algebra(T);
    auto a = support::random_layout_map(rng, S, T, sa, ta, 2, support::Phases::None);
    auto b = support::random_layout_map(rng, S, T, sa, ta, 2, support::Phases::None);
    auto signs = [&] {
      std::vector<Complex> z(ta->size());
      for (auto& x : z) x = support::coin(rng) ? -1.0 : 1.0;
      return z;
    };
    auto pa = a.map.with_phases(signs());
    auto pb = b.map.with_phases(signs());
    const bool oracle = support::brute_force_equivalent(pa, pb);
    CHECK((conjugacy_class(pa) == conjugacy_class(pb)) == oracle);
    (oracle ? equivalent : inequivalent)++;
  }
  CHECK(equivalent > 10);
  CHECK(inequivalent > 10);
}

TEST_CASE("property: class keys are invariant under inner twists") {
  Rng rng(0xc0475);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = support::uniform(rng, 2, 7);
    auto ta = support::random_digraph_algebra(rng, n);
    // Identity on a random algebra, then twisted inside the target.
    auto phi = identity_map(ta);
    auto w = support::random_standard_unitary(rng, *ta, support::Phases::Any);
    CHECK(conjugacy_class(conjugate(w, phi)) == conjugacy_class(phi));
    auto v = standard_witness(phi, conjugate(w, phi));
    CHECK(conjugates_exactly(v, phi, conjugate(w, phi)));
  }
}

TEST_CASE("property: restandardization of twisted triangles") {
  Rng rng(0xc0476);
  for (int trial = 0; trial < 100; ++trial) {
    const int r = support::uniform(rng, 1, 3);
    auto sys = tr_refinement_system(r, 3);
    const auto& phi1 = sys.connectors[0];
    const auto& phi2 = sys.connectors[1];
    auto theta = compose(phi2, phi1);

    // Standard twist by the image of a unitary commuting with phi1.
    std::vector<int> sigma{0, 1};
    if (support::coin(rng)) std::swap(sigma[0], sigma[1]);
    auto x = support::band_twist(r, sigma, support::random_phases(rng, 2, support::Phases::Any));
    auto twisted = compose(phi2, conjugate(x, identity_map(phi2.source())));
    REQUIRE(same_map(compose(twisted, phi1), theta));
    auto rs = restandardize_triangle(theta, phi1, CrossoverMap(twisted));
    CHECK(same_map(compose(rs.standard, phi1), theta));
    CHECK(conjugates_exactly(std::get<StandardPartialIsometry>(rs.unitary), twisted,
                             rs.standard));

    // Dense twist: the same construction with a general unitary.
    Matrix y = support::random_unitary(rng, 2);
    Matrix z = support::dense_apply(phi2, support::dense_band_twist(r, y));
    auto numeric = support::conjugated(z, to_numeric(phi2));
    auto rn = restandardize_triangle(theta, phi1, CrossoverMap(numeric));
    CHECK(same_map(compose(rn.standard, phi1), theta));
    Matrix u = to_dense(rn.unitary);
    CHECK(support::unit_distance(support::conjugated(u, numeric), to_numeric(rn.standard)) <=
          1e-9);
  }
}
