#include "limitalg/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace limitalg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NotReflexive: return "NotReflexive";
    case ErrorCode::NotTransitive: return "NotTransitive";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::NotInjective: return "NotInjective";
    case ErrorCode::EdgeIncompatible: return "EdgeIncompatible";
    case ErrorCode::BlockPartial: return "BlockPartial";
    case ErrorCode::ImageOverlap: return "ImageOverlap";
    case ErrorCode::SourceTargetMismatch: return "SourceTargetMismatch";
    case ErrorCode::AmbientTooSmall: return "AmbientTooSmall";
    case ErrorCode::NotMultiplicative: return "NotMultiplicative";
    case ErrorCode::NotStarConsistent: return "NotStarConsistent";
    case ErrorCode::NotInRange: return "NotInRange";
    case ErrorCode::ProfileMismatch: return "ProfileMismatch";
    case ErrorCode::NotInnerEquivalent: return "NotInnerEquivalent";
    case ErrorCode::TriangleNotCommuting: return "TriangleNotCommuting";
    case ErrorCode::NotRegular: return "NotRegular";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::InconsistentRanks: return "InconsistentRanks";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::TooFarApart: return "TooFarApart";
    case ErrorCode::CensusMismatch: return "CensusMismatch";
    case ErrorCode::DepthUnavailable: return "DepthUnavailable";
    case ErrorCode::BandMismatch: return "BandMismatch";
    case ErrorCode::NotTrBand: return "NotTrBand";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Unknown";
}

std::vector<Edge> Digraph::edges() const {
  std::vector<Edge> out;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (has_edge(i, j)) out.push_back({i, j});
  return out;
}

bool Digraph::is_reflexive() const {
  for (int i = 0; i < n_; ++i)
    if (!has_edge(i, i)) return false;
  return true;
}

bool Digraph::is_transitive() const {
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      if (!has_edge(i, j)) continue;
      for (int k = 0; k < n_; ++k)
        if (has_edge(j, k) && !has_edge(i, k)) return false;
    }
  return true;
}

namespace {

// Union-find over {0..n-1}; components come out ordered by least element.
std::vector<std::vector<int>> components(int n, auto&& linked) {
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (linked(i, j)) {
        int a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
  std::vector<std::vector<int>> out;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    int root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[slot[root]].push_back(i);
  }
  return out;
}

}  // namespace

DigraphAlgebra::DigraphAlgebra(Digraph graph) : graph_(std::move(graph)) {
  const int n = graph_.size();
  blocks_ = components(n, [&](int i, int j) {
    return graph_.has_edge(i, j) && graph_.has_edge(j, i);
  });
  classes_ = components(n, [&](int i, int j) {
    return graph_.has_edge(i, j) || graph_.has_edge(j, i);
  });
  block_of_.assign(n, -1);
  class_of_.assign(n, -1);
  for (int b = 0; b < static_cast<int>(blocks_.size()); ++b)
    for (int i : blocks_[b]) block_of_[i] = b;
  for (int c = 0; c < static_cast<int>(classes_.size()); ++c)
    for (int i : classes_[c]) class_of_[i] = c;

  const int nb = static_cast<int>(blocks_.size());
  reduced_ = Digraph(nb);
  for (int a = 0; a < nb; ++a)
    for (int b = 0; b < nb; ++b)
      if (graph_.has_edge(blocks_[a].front(), blocks_[b].front()))
        reduced_.add_edge(a, b);
}

std::vector<int> DigraphAlgebra::blocks_of_class(int c) const {
  std::vector<int> out;
  for (int b = 0; b < static_cast<int>(blocks_.size()); ++b)
    if (class_of_block(b) == c) out.push_back(b);
  return out;
}

AlgebraPtr build_digraph_algebra(int n, std::span<const Edge> edges) {
  if (n < 1) throw Error(ErrorCode::InvalidInput, "algebra needs n >= 1");
  Digraph g(n);
  for (const Edge& e : edges) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
      throw Error(ErrorCode::InvalidInput,
                  "edge (" + std::to_string(e.from + 1) + "," +
                      std::to_string(e.to + 1) + ") outside 1.." +
                      std::to_string(n),
                  {e.from + 1, e.to + 1});
    g.add_edge(e.from, e.to);
  }
  for (int i = 0; i < n; ++i)
    if (!g.has_edge(i, i))
      throw Error(ErrorCode::NotReflexive,
                  "missing loop at " + std::to_string(i + 1), {i + 1});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!g.has_edge(i, j)) continue;
      for (int k = 0; k < n; ++k)
        if (g.has_edge(j, k) && !g.has_edge(i, k))
          throw Error(ErrorCode::NotTransitive,
                      "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                          ") and (" + std::to_string(j + 1) + "," +
                          std::to_string(k + 1) + ") without (" +
                          std::to_string(i + 1) + "," + std::to_string(k + 1) +
                          ")",
                      {i + 1, j + 1, k + 1});
    }
  return std::make_shared<const DigraphAlgebra>(std::move(g));
}

AlgebraPtr full_matrix_algebra(int n) {
  Digraph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g.add_edge(i, j);
  return std::make_shared<const DigraphAlgebra>(std::move(g));
}

AlgebraPtr diagonal_algebra(int n) {
  Digraph g(n);
  for (int i = 0; i < n; ++i) g.add_edge(i, i);
  return std::make_shared<const DigraphAlgebra>(std::move(g));
}

AlgebraPtr nest_algebra(std::span<const int> band_sizes) {
  std::vector<int> band;
  for (int b = 0; b < static_cast<int>(band_sizes.size()); ++b)
    for (int k = 0; k < band_sizes[b]; ++k) band.push_back(b);
  const int n = static_cast<int>(band.size());
  if (n == 0) throw Error(ErrorCode::InvalidInput, "empty nest algebra");
  Digraph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (band[i] <= band[j]) g.add_edge(i, j);
  return std::make_shared<const DigraphAlgebra>(std::move(g));
}

AlgebraPtr tr_algebra(int r, int multiplicity) {
  std::vector<int> sizes(r, multiplicity);
  return nest_algebra(sizes);
}

AlgebraPtr direct_sum(std::span<const AlgebraPtr> summands) {
  int n = 0;
  for (const auto& s : summands) n += s->size();
  Digraph g(n);
  int offset = 0;
  for (const auto& s : summands) {
    for (const Edge& e : s->edges()) g.add_edge(offset + e.from, offset + e.to);
    offset += s->size();
  }
  return std::make_shared<const DigraphAlgebra>(std::move(g));
}

AlgebraPtr self_adjoint_envelope(const DigraphAlgebra& a) {
  Digraph g(a.size());
  for (const auto& cls : a.classes())
    for (int i : cls)
      for (int j : cls) g.add_edge(i, j);
  return std::make_shared<const DigraphAlgebra>(std::move(g));
}

bool reduced_has_cycle(const DigraphAlgebra& a) {
  const Digraph& h = a.reduced();
  const int nb = h.size();
  int hasse_edges = 0;
  for (int x = 0; x < nb; ++x)
    for (int y = 0; y < nb; ++y) {
      if (x == y || !h.has_edge(x, y)) continue;
      bool covering = true;
      for (int z = 0; z < nb && covering; ++z)
        if (z != x && z != y && h.has_edge(x, z) && h.has_edge(z, y))
          covering = false;
      if (covering) ++hasse_edges;
    }
  // Hasse edges link blocks of one class, so the forest bound is blocks - classes.
  return hasse_edges > nb - static_cast<int>(a.classes().size());
}

RankMatrix rank_profile(std::span<const StandardProjection> projections,
                        const DigraphAlgebra& a) {
  const int s = static_cast<int>(projections.size());
  std::vector<int> owner(a.size(), -1);
  for (int j = 0; j < s; ++j)
    for (int i : projections[j].support) {
      if (i < 0 || i >= a.size())
        throw Error(ErrorCode::InvalidInput,
                    "projection support index out of range", {j + 1, i + 1});
      if (owner[i] >= 0 && owner[i] != j)
        throw Error(ErrorCode::NotOrthogonal,
                    "projections " + std::to_string(owner[i] + 1) + " and " +
                        std::to_string(j + 1) + " share index " +
                        std::to_string(i + 1),
                    {owner[i] + 1, j + 1});
      owner[i] = j;
    }
  RankMatrix out = RankMatrix::Zero(static_cast<int>(a.blocks().size()), s);
  for (int j = 0; j < s; ++j)
    for (int i : projections[j].support) out(a.block_of(i), j) += 1;
  return out;
}

StandardPartialIsometry::StandardPartialIsometry(int n, std::vector<int> target,
                                                 std::vector<Complex> phases)
    : target_(std::move(target)), phases_(std::move(phases)) {
  if (static_cast<int>(target_.size()) != n)
    throw Error(ErrorCode::InvalidInput, "partial isometry size mismatch");
  if (phases_.empty()) phases_.assign(n, Complex(1.0, 0.0));
  if (static_cast<int>(phases_.size()) != n)
    throw Error(ErrorCode::InvalidInput, "phase vector size mismatch");
  std::vector<char> hit(n, 0);
  for (int i = 0; i < n; ++i) {
    int t = target_[i];
    if (t < 0) {
      target_[i] = -1;
      continue;
    }
    if (t >= n)
      throw Error(ErrorCode::InvalidInput, "partial isometry target out of range",
                  {i + 1, t + 1});
    if (hit[t])
      throw Error(ErrorCode::NotInjective, "partial isometry is not injective",
                  {t + 1});
    hit[t] = 1;
    if (std::abs(std::abs(phases_[i]) - 1.0) > 1e-9)
      throw Error(ErrorCode::InvalidInput, "phase is not unimodular", {i + 1});
  }
}

StandardPartialIsometry StandardPartialIsometry::identity(int n) {
  std::vector<int> t(n);
  std::iota(t.begin(), t.end(), 0);
  return StandardPartialIsometry(n, std::move(t));
}

bool StandardPartialIsometry::is_unitary() const {
  return std::none_of(target_.begin(), target_.end(), [](int t) { return t < 0; });
}

bool StandardPartialIsometry::is_identity() const {
  for (int i = 0; i < size(); ++i)
    if (target_[i] != i || phases_[i] != Complex(1.0, 0.0)) return false;
  return true;
}

StandardPartialIsometry StandardPartialIsometry::adjoint() const {
  const int n = size();
  std::vector<int> t(n, -1);
  std::vector<Complex> p(n, Complex(1.0, 0.0));
  for (int i = 0; i < n; ++i)
    if (target_[i] >= 0) {
      t[target_[i]] = i;
      p[target_[i]] = std::conj(phases_[i]);
    }
  return StandardPartialIsometry(n, std::move(t), std::move(p));
}

StandardPartialIsometry StandardPartialIsometry::operator*(
    const StandardPartialIsometry& rhs) const {
  const int n = size();
  if (rhs.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "partial isometry sizes differ");
  std::vector<int> t(n, -1);
  std::vector<Complex> p(n, Complex(1.0, 0.0));
  for (int i = 0; i < n; ++i) {
    int mid = rhs.target_[i];
    if (mid < 0 || target_[mid] < 0) continue;
    t[i] = target_[mid];
    p[i] = phases_[mid] * rhs.phases_[i];
  }
  return StandardPartialIsometry(n, std::move(t), std::move(p));
}

Matrix StandardPartialIsometry::to_dense() const {
  const int n = size();
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    if (target_[i] >= 0) m(target_[i], i) = phases_[i];
  return m;
}

bool is_normalizing(const StandardPartialIsometry& v, const DigraphAlgebra& a) {
  if (v.size() != a.size()) return false;
  for (int i = 0; i < v.size(); ++i)
    if (v.target(i) >= 0 && !a.has_edge(v.target(i), i)) return false;
  return true;
}

PermutationUnitary::PermutationUnitary(const DigraphAlgebra& a,
                                       std::vector<int> perm)
    : perm_(std::move(perm)) {
  if (static_cast<int>(perm_.size()) != a.size())
    throw Error(ErrorCode::InvalidInput, "permutation size mismatch");
  std::vector<char> hit(perm_.size(), 0);
  for (int i = 0; i < a.size(); ++i) {
    int t = perm_[i];
    if (t < 0 || t >= a.size() || hit[t])
      throw Error(ErrorCode::InvalidInput, "not a permutation", {i + 1});
    hit[t] = 1;
    if (a.block_of(t) != a.block_of(i))
      throw Error(ErrorCode::InvalidInput,
                  "permutation leaves block " + std::to_string(a.block_of(i) + 1),
                  {i + 1, t + 1});
  }
}

StandardPartialIsometry PermutationUnitary::as_partial_isometry() const {
  return StandardPartialIsometry(static_cast<int>(perm_.size()), perm_);
}

}  // namespace limitalg
