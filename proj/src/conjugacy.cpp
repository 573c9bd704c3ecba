#include "limitalg/conjugacy.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace limitalg {

const AlgebraPtr& source_of(const CrossoverMap& m) {
  return std::visit([](const auto& x) -> const AlgebraPtr& { return x.source(); }, m);
}

const AlgebraPtr& target_of(const CrossoverMap& m) {
  return std::visit([](const auto& x) -> const AlgebraPtr& { return x.target(); }, m);
}

NumericStarMap as_numeric(const CrossoverMap& m) {
  if (const auto* s = std::get_if<StandardRegularMap>(&m)) return to_numeric(*s);
  return std::get<NumericStarMap>(m);
}

Matrix to_dense(const Unitary& u) {
  if (const auto* s = std::get_if<StandardPartialIsometry>(&u)) return s->to_dense();
  return std::get<Matrix>(u);
}

Unitary adjoint(const Unitary& u) {
  if (const auto* s = std::get_if<StandardPartialIsometry>(&u)) return s->adjoint();
  return Matrix(std::get<Matrix>(u).adjoint());
}

Unitary multiply(const Unitary& a, const Unitary& b) {
  const auto* sa = std::get_if<StandardPartialIsometry>(&a);
  const auto* sb = std::get_if<StandardPartialIsometry>(&b);
  if (sa && sb) return (*sa) * (*sb);
  return Matrix(to_dense(a) * to_dense(b));
}

bool is_identity(const Unitary& u, double tol) {
  if (const auto* s = std::get_if<StandardPartialIsometry>(&u)) {
    for (int i = 0; i < s->size(); ++i)
      if (s->target(i) != i || std::abs(s->phase(i) - 1.0) > tol) return false;
    return true;
  }
  const Matrix& m = std::get<Matrix>(u);
  return (m - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

PermutationUnitary permutation_intertwiner(std::span<const StandardProjection> p,
                                           std::span<const StandardProjection> q,
                                           const DigraphAlgebra& a) {
  if (p.size() != q.size())
    throw Error(ErrorCode::InvalidInput, "projection families differ in length");
  RankMatrix rp = rank_profile(p, a);
  RankMatrix rq = rank_profile(q, a);
  for (int r = 0; r < rp.rows(); ++r)
    for (int j = 0; j < rp.cols(); ++j)
      if (rp(r, j) != rq(r, j))
        throw Error(ErrorCode::ProfileMismatch,
                    "rank of projection " + std::to_string(j + 1) + " in block " +
                        std::to_string(r + 1) + " differs",
                    {r + 1, j + 1});
  const int n = a.size();
  std::vector<int> perm(n, -1);
  std::vector<char> p_used(n, 0), q_used(n, 0);
  for (std::size_t j = 0; j < p.size(); ++j)
    for (int r = 0; r < static_cast<int>(a.blocks().size()); ++r) {
      std::vector<int> ps, qs;
      for (int i : p[j].support)
        if (a.block_of(i) == r) ps.push_back(i);
      for (int i : q[j].support)
        if (a.block_of(i) == r) qs.push_back(i);
      std::sort(ps.begin(), ps.end());
      std::sort(qs.begin(), qs.end());
      for (std::size_t k = 0; k < qs.size(); ++k) {
        perm[qs[k]] = ps[k];
        q_used[qs[k]] = 1;
        p_used[ps[k]] = 1;
      }
    }
  for (const auto& block : a.blocks()) {
    std::vector<int> from, to;
    for (int i : block) {
      if (!q_used[i]) from.push_back(i);
      if (!p_used[i]) to.push_back(i);
    }
    for (std::size_t k = 0; k < from.size(); ++k) perm[from[k]] = to[k];
  }
  return PermutationUnitary(a, std::move(perm));
}

ClassKey conjugacy_class(const StandardRegularMap& phi) {
  return {class_multiset(phi), diagonal_rank_profile(phi)};
}

StandardPartialIsometry standard_witness(const StandardRegularMap& phi1,
                                         const StandardRegularMap& phi2) {
  if (!(*phi1.source() == *phi2.source()) || !(*phi1.target() == *phi2.target()))
    throw Error(ErrorCode::SourceTargetMismatch, "maps are not parallel");
  if (!(conjugacy_class(phi1) == conjugacy_class(phi2)))
    throw Error(ErrorCode::NotInnerEquivalent, "class keys differ");
  const auto d1 = decompose_maximal(phi1);
  const auto d2 = decompose_maximal(phi2);
  std::vector<StandardProjection> p, q;
  for (std::size_t s = 0; s < d1.size(); ++s)
    for (int i = 0; i < phi1.source()->size(); ++i)
      if (d1[s].defined(i)) {
        q.push_back({{d1[s](i)}});
        p.push_back({{d2[s](i)}});
      }
  const auto& b = *phi1.target();
  PermutationUnitary sigma = permutation_intertwiner(p, q, b);
  std::vector<char> in_image(b.size(), 0);
  for (const auto& s : d1)
    for (int t : s.image()) in_image[t] = 1;
  std::vector<Complex> delta(b.size(), Complex(1.0, 0.0));
  for (int t = 0; t < b.size(); ++t)
    if (in_image[t]) delta[t] = phi2.phases()[sigma(t)] / phi1.phases()[t];
  return StandardPartialIsometry(b.size(), sigma.perm(), std::move(delta));
}

double standard_distance(const StandardRegularMap& a, const StandardRegularMap& b) {
  if (!(*a.source() == *b.source()) || a.target()->size() != b.target()->size())
    throw Error(ErrorCode::SourceTargetMismatch, "maps are not parallel");
  double d = 0.0;
  for (const Edge& e : a.source()->edges()) {
    std::map<std::pair<int, int>, Complex> diff;
    for (const auto& t : a.image(e.from, e.to)) diff[{t.row, t.col}] += t.coeff;
    for (const auto& t : b.image(e.from, e.to)) diff[{t.row, t.col}] -= t.coeff;
    std::map<int, int> rows, cols;
    for (const auto& [rc, c] : diff)
      if (std::abs(c) > 0) {
        rows.emplace(rc.first, static_cast<int>(rows.size()));
        cols.emplace(rc.second, static_cast<int>(cols.size()));
      }
    if (rows.empty()) continue;
    Matrix m = Matrix::Zero(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    for (const auto& [rc, c] : diff)
      if (std::abs(c) > 0) m(rows[rc.first], cols[rc.second]) = c;
    d = std::max(d, operator_norm(m));
  }
  return d;
}

Restandardized restandardize_triangle(const StandardRegularMap& theta,
                                      const StandardRegularMap& phi1, const CrossoverMap& phi2,
                                      double tol) {
  if (const auto* s = std::get_if<StandardRegularMap>(&phi2)) {
    StandardRegularMap comp = compose(*s, phi1);
    if (!same_map(comp, theta)) {
      double r = standard_distance(comp, theta);
      if (r > tol)
        throw Error(ErrorCode::TriangleNotCommuting,
                    "triangle residual " + std::to_string(r), {}, r);
    }
    StandardPartialIsometry v = standard_witness(comp, theta);
    return {v, conjugate(v, *s)};
  }
  const auto& numeric = std::get<NumericStarMap>(phi2);
  const double r = map_distance(compose(numeric, phi1), to_numeric(theta));
  if (r > tol)
    throw Error(ErrorCode::TriangleNotCommuting, "triangle residual " + std::to_string(r), {}, r);
  RegularityVerdict verdict = is_regular(numeric);
  if (!verdict.regular) throw Error(ErrorCode::NotRegular, verdict.reason, {}, verdict.residual);
  const StandardRegularMap& psi = *verdict.standard;
  StandardPartialIsometry v = standard_witness(compose(psi, phi1), theta);
  return {Matrix(v.to_dense() * verdict.unitary), conjugate(v, psi)};
}

}  // namespace limitalg
