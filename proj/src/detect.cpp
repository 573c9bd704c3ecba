#include "limitalg/detect.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace limitalg {

namespace {

bool sym_edge(const DigraphAlgebra& a, int i, int j) {
  return a.has_edge(i, j) || a.has_edge(j, i);
}

Matrix block_projection(const DigraphAlgebra& b, int block) {
  Matrix p = Matrix::Zero(b.size(), b.size());
  for (int t : b.blocks()[block]) p(t, t) = 1.0;
  return p;
}

int rounded_trace(const Matrix& m) { return static_cast<int>(std::lround(m.trace().real())); }

// Image of e_{i,root} along a BFS tree of the class.
std::vector<Matrix> tree_images(const NumericStarMap& phi, int cls) {
  const auto& a = *phi.source();
  const int n = a.size();
  const int root = a.classes()[cls].front();
  std::vector<Matrix> down(n);
  std::vector<char> seen(n, 0);
  std::deque<int> queue{root};
  seen[root] = 1;
  down[root] = phi.image(root, root);
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int w = 0; w < n; ++w)
      if (!seen[w] && sym_edge(a, w, u)) {
        seen[w] = 1;
        down[w] = phi.envelope_image(w, u) * down[u];
        queue.push_back(w);
      }
  }
  return down;
}

// pi is indexed by source block.
Matrix product_matrix(const NumericStarMap& phi, const TestWord& w, const std::vector<int>& pi,
                      const std::vector<Matrix>& projections) {
  const auto& a = *phi.source();
  Matrix m = Matrix::Identity(phi.target_size(), phi.target_size());
  for (const Token& t : w.tokens)
    m = m * phi.envelope_image(t.row, t.col) * projections[pi[a.block_of(t.col)]];
  return m;
}

struct ClassCandidates {
  int cls;
  std::vector<std::vector<int>> maps;  // indexed by source block, -1 off the class
};

}  // namespace

TestWord test_word(const DigraphAlgebra& a, int component) {
  if (component < 0 || component >= static_cast<int>(a.classes().size()))
    throw Error(ErrorCode::Disconnected, "no class " + std::to_string(component + 1),
                {component + 1});
  const auto& cls = a.classes()[component];
  const int root = cls.front();
  TestWord w{{}, root};
  if (cls.size() == 1) {
    w.tokens.push_back({root, root, false});
    return w;
  }
  std::vector<char> seen(a.size(), 0);
  auto token = [&](int r, int c) { return Token{r, c, !a.has_edge(r, c)}; };
  auto dfs = [&](auto&& self, int u) -> void {
    seen[u] = 1;
    for (int v = 0; v < a.size(); ++v)
      if (!seen[v] && v != u && sym_edge(a, u, v)) {
        w.tokens.push_back(token(u, v));
        self(self, v);
        w.tokens.push_back(token(v, u));
      }
  };
  dfs(dfs, root);
  for (int i : cls)
    if (!seen[i])
      throw Error(ErrorCode::Disconnected, "class " + std::to_string(component + 1) +
                                               " is not connected",
                  {component + 1});
  return w;
}

double class_threshold(const DigraphAlgebra& a, int component) {
  return 1.0 / (test_word(a, component).length() + 1);
}

double threshold(const DigraphAlgebra& a) {
  double c = 1.0;
  for (int k = 0; k < static_cast<int>(a.classes().size()); ++k)
    c = std::min(c, class_threshold(a, k));
  return c;
}

TestProductResult test_product(const NumericStarMap& phi, const MultiplicityOneMap& alpha) {
  const auto& a = *phi.source();
  const auto& b = *phi.target();
  if (!(*alpha.source() == a) || !(*alpha.target() == b))
    throw Error(ErrorCode::SourceTargetMismatch, "map and summand are not parallel");
  std::vector<Matrix> projections;
  for (int r = 0; r < static_cast<int>(b.blocks().size()); ++r)
    projections.push_back(block_projection(b, r));
  const auto pi = alpha.index_map().pi;
  double norm = 1.0;
  bool any = false;
  for (int cls : alpha.domain_classes()) {
    norm = std::min(norm, operator_norm(product_matrix(phi, test_word(a, cls), pi, projections)));
    any = true;
  }
  if (!any) norm = 0.0;
  return {norm, norm >= 0.5};
}

SummandCensus summand_census(const NumericStarMap& phi) {
  const auto& a = *phi.source();
  const auto& b = *phi.target();
  const int nb_src = static_cast<int>(a.blocks().size());
  const int nb_tgt = static_cast<int>(b.blocks().size());
  const double tol = std::max(phi.tolerance(), 1e-9);

  std::vector<Matrix> projections;
  for (int r = 0; r < nb_tgt; ++r) projections.push_back(block_projection(b, r));

  // observed(r, j) = rank of P_r φ(e_jj) P_r
  RankMatrix observed(nb_tgt, a.size());
  for (int j = 0; j < a.size(); ++j)
    for (int r = 0; r < nb_tgt; ++r)
      observed(r, j) = rounded_trace(projections[r] * phi.image(j, j) * projections[r]);

  // Backtracking over edge-preserving block maps with room in every target
  // block and nonzero observed rank where each block lands.
  long explored = 0;
  std::vector<ClassCandidates> candidates;
  for (int c = 0; c < static_cast<int>(a.classes().size()); ++c) {
    ClassCandidates cc{c, {}};
    const auto blocks = a.blocks_of_class(c);
    std::vector<int> pi(nb_src, -1);
    std::vector<int> load(nb_tgt, 0);
    auto rec = [&](auto&& self, std::size_t k) -> void {
      if (k == blocks.size()) {
        if (++explored > kCensusCapacity)
          throw Error(ErrorCode::CapacityExceeded,
                      "more than " + std::to_string(kCensusCapacity) + " candidate index maps",
                      {kCensusCapacity});
        cc.maps.push_back(pi);
        return;
      }
      const int sb = blocks[k];
      const int size = static_cast<int>(a.blocks()[sb].size());
      for (int r = 0; r < nb_tgt; ++r) {
        if (load[r] + size > static_cast<int>(b.blocks()[r].size())) continue;
        if (observed(r, a.blocks()[sb].front()) == 0) continue;
        bool ok = true;
        for (std::size_t q = 0; q < k && ok; ++q) {
          int ob = blocks[q];
          if (a.reduced().has_edge(sb, ob) && !b.reduced().has_edge(r, pi[ob])) ok = false;
          if (a.reduced().has_edge(ob, sb) && !b.reduced().has_edge(pi[ob], r)) ok = false;
        }
        if (!ok) continue;
        pi[sb] = r;
        load[r] += size;
        self(self, k + 1);
        load[r] -= size;
        pi[sb] = -1;
      }
    };
    rec(rec, 0);
    candidates.push_back(std::move(cc));
  }

  SummandCensus census;
  RankMatrix explained = RankMatrix::Zero(nb_tgt, a.size());
  int explained_total = 0;
  for (const auto& cc : candidates) {
    const TestWord w = test_word(a, cc.cls);
    const int class_size = static_cast<int>(a.classes()[cc.cls].size());
    for (const auto& pi : cc.maps) {
      Matrix t = product_matrix(phi, w, pi, projections);
      Eigen::JacobiSVD<Matrix> svd(t);
      const auto& s = svd.singularValues();
      int m = 0;
      for (int k = 0; k < s.size(); ++k)
        if (std::abs(s(k) - 1.0) <= tol) ++m;
      if (m == 0) continue;
      census.classes[IndexMap{pi}] = m;
      for (int j : a.classes()[cc.cls]) explained(pi[a.block_of(j)], j) += m;
      explained_total += m * class_size;
    }
  }
  for (int j = 0; j < a.size(); ++j)
    for (int r = 0; r < nb_tgt; ++r)
      if (explained(r, j) > observed(r, j))
        throw Error(ErrorCode::InconsistentRanks,
                    "detected multiplicity " + std::to_string(explained(r, j)) +
                        " exceeds rank " + std::to_string(observed(r, j)) + " at block " +
                        std::to_string(r + 1) + ", index " + std::to_string(j + 1),
                    {r + 1, j + 1});
  census.residual_rank = rounded_trace(phi.unit_image()) - explained_total;
  return census;
}

StandardRegularMap census_standard_form(const SummandCensus& census, AlgebraPtr source,
                                        AlgebraPtr target) {
  const auto& a = *source;
  const auto& b = *target;
  std::vector<std::size_t> next(b.blocks().size(), 0);
  std::vector<MultiplicityOneMap> summands;
  for (const auto& [key, mult] : census.classes) {
    if (static_cast<int>(key.pi.size()) != static_cast<int>(a.blocks().size()))
      throw Error(ErrorCode::ShapeMismatch, "index map does not match the source blocks");
    for (int copy = 0; copy < mult; ++copy) {
      std::vector<int> iota(a.size(), -1);
      for (int i = 0; i < a.size(); ++i) {
        int r = key.pi[a.block_of(i)];
        if (r < 0) continue;
        if (next[r] >= b.blocks()[r].size())
          throw Error(ErrorCode::AmbientTooSmall,
                      "target block " + std::to_string(r + 1) + " is too small for the census",
                      {r + 1});
        iota[i] = b.blocks()[r][next[r]++];
      }
      summands.push_back(validate_multiplicity_one(std::move(iota), source, target));
    }
  }
  return assemble_regular(std::move(source), std::move(target), std::move(summands));
}

RegularityVerdict is_regular(const NumericStarMap& phi) {
  const auto& a = *phi.source();
  const auto& b = *phi.target();
  const int n2 = b.size();
  const double tol = std::max(phi.tolerance(), 1e-9);
  RegularityVerdict v;
  v.threshold = threshold(a);
  try {
    v.census = summand_census(phi);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InconsistentRanks) throw;
    v.reason = e.what();
    return v;
  }
  if (v.census.residual_rank != 0) {
    v.reason = "residual rank " + std::to_string(v.census.residual_rank);
    return v;
  }
  StandardRegularMap psi = census_standard_form(v.census, phi.source(), phi.target());

  // Rows of U*: u = φ(e_{i,root}) f for each copy's root vector f, sent to the
  // slot of i in that copy.
  std::vector<Matrix> projections;
  for (int r = 0; r < static_cast<int>(b.blocks().size()); ++r)
    projections.push_back(block_projection(b, r));
  Matrix ustar = Matrix::Zero(n2, n2);  // column t = preimage of e_t
  std::vector<char> used(n2, 0);
  std::size_t summand = 0;
  for (const auto& [key, mult] : v.census.classes) {
    int cls = -1;
    for (int i = 0; i < a.size() && cls < 0; ++i)
      if (key.pi[a.block_of(i)] >= 0) cls = a.class_of(i);
    const TestWord w = test_word(a, cls);
    Eigen::JacobiSVD<Matrix> svd(product_matrix(phi, w, key.pi, projections), Eigen::ComputeFullV);
    const auto down = tree_images(phi, cls);
    int copy = 0;
    for (int k = 0; k < svd.singularValues().size() && copy < mult; ++k) {
      if (std::abs(svd.singularValues()(k) - 1.0) > tol) continue;
      Eigen::VectorXcd f = svd.matrixV().col(k);
      const auto& s = psi.summands()[summand + copy];
      for (int i : a.classes()[cls]) {
        ustar.col(s(i)) = down[i] * f;
        used[s(i)] = 1;
      }
      ++copy;
    }
    summand += mult;
  }
  // Complete block by block with an orthonormal complement on the free slots.
  for (int r = 0; r < static_cast<int>(b.blocks().size()); ++r) {
    const auto& idx = b.blocks()[r];
    const int d = static_cast<int>(idx.size());
    std::vector<int> used_slots, free_slots;
    for (int t : idx) (used[t] ? used_slots : free_slots).push_back(t);
    if (free_slots.empty()) continue;
    Matrix basis(d, used_slots.size());
    for (std::size_t c = 0; c < used_slots.size(); ++c)
      for (int q = 0; q < d; ++q) basis(q, c) = ustar(idx[q], used_slots[c]);
    Matrix comp;
    if (used_slots.empty()) {
      comp = Matrix::Identity(d, d);
    } else {
      Eigen::JacobiSVD<Matrix> svd(basis, Eigen::ComputeFullU);
      comp = svd.matrixU().rightCols(d - static_cast<int>(used_slots.size()));
    }
    for (std::size_t c = 0; c < free_slots.size(); ++c)
      for (int q = 0; q < d; ++q) ustar(idx[q], free_slots[c]) = comp(q, c);
  }
  // Keep U block diagonal, then snap to the nearest unitary.
  Matrix x = Matrix::Zero(n2, n2);
  for (const auto& p : projections) x += p * ustar.adjoint() * p;
  Eigen::JacobiSVD<Matrix> polar(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = polar.singularValues();
  if (sv.size() > 0 && sv(sv.size() - 1) < 1e-8) {
    v.reason = "intertwiner is singular";
    return v;
  }
  Matrix u = polar.matrixU() * polar.matrixV().adjoint();
  v.residual = map_distance(conjugate(u, phi), to_numeric(psi));
  v.regular = v.residual <= tol;
  if (!v.regular) v.reason = "intertwining residual " + std::to_string(v.residual);
  v.unitary = std::move(u);
  v.standard = std::move(psi);
  return v;
}

Matrix close_conjugacy(const NumericStarMap& phi1, const NumericStarMap& phi2) {
  const double c = threshold(*phi1.source());
  const double d = map_distance(phi1, phi2);
  if (d >= c)
    throw Error(ErrorCode::TooFarApart,
                "distance " + std::to_string(d) + " is not below " + std::to_string(c), {}, d);
  auto r1 = is_regular(phi1);
  auto r2 = is_regular(phi2);
  if (!(r1.census == r2.census))
    throw Error(ErrorCode::CensusMismatch, "the maps have different summand censuses");
  if (!r1.regular || !r2.regular)
    throw Error(ErrorCode::NotRegular, r1.regular ? r2.reason : r1.reason);
  // Both censuses give the same standard form, so the witnesses chain directly.
  Matrix u = r2.unitary.adjoint() * r1.unitary;
  const double tol = std::max({phi1.tolerance(), phi2.tolerance(), 1e-9});
  const double res = map_distance(conjugate(u, phi1), phi2);
  if (res > tol)
    throw Error(ErrorCode::ResidualTooLarge, "conjugacy residual " + std::to_string(res), {}, res);
  return u;
}

}  // namespace limitalg
