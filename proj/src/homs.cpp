#include "limitalg/homs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace limitalg {

namespace {

std::string pair_str(int i, int j) {
  return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

void require_same(const DigraphAlgebra& a, const DigraphAlgebra& b, const char* what) {
  if (!(a == b)) throw Error(ErrorCode::SourceTargetMismatch, what);
}

std::vector<Complex> unit_phases(int n) { return std::vector<Complex>(n, Complex(1.0, 0.0)); }

// Cheap test first: the Frobenius norm bounds the operator norm from above.
double residual_norm(const Matrix& m, double tol) {
  double f = m.norm();
  if (f <= tol) return f;
  return operator_norm(m);
}

}  // namespace

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

IndexMap MultiplicityOneMap::index_map() const {
  IndexMap out{std::vector<int>(source_->blocks().size(), -1)};
  for (int b = 0; b < static_cast<int>(out.pi.size()); ++b) {
    int rep = source_->blocks()[b].front();
    if (iota_[rep] >= 0) out.pi[b] = target_->block_of(iota_[rep]);
  }
  return out;
}

std::vector<int> MultiplicityOneMap::image() const {
  std::vector<int> out;
  for (int t : iota_)
    if (t >= 0) out.push_back(t);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> MultiplicityOneMap::domain_classes() const {
  std::vector<int> out;
  for (int c = 0; c < static_cast<int>(source_->classes().size()); ++c)
    if (iota_[source_->classes()[c].front()] >= 0) out.push_back(c);
  return out;
}

MultiplicityOneMap validate_multiplicity_one(std::vector<int> iota, AlgebraPtr source,
                                             AlgebraPtr target) {
  const int n1 = source->size();
  const int n2 = target->size();
  if (static_cast<int>(iota.size()) != n1)
    throw Error(ErrorCode::InvalidInput, "iota must have one entry per source index");
  std::vector<int> hit(n2, -1);
  for (int i = 0; i < n1; ++i) {
    if (iota[i] < 0) {
      iota[i] = -1;
      continue;
    }
    if (iota[i] >= n2)
      throw Error(ErrorCode::InvalidInput, "iota value outside target", {i + 1, iota[i] + 1});
    if (hit[iota[i]] >= 0)
      throw Error(ErrorCode::NotInjective,
                  "indices " + std::to_string(hit[iota[i]] + 1) + " and " +
                      std::to_string(i + 1) + " share image " + std::to_string(iota[i] + 1),
                  {hit[iota[i]] + 1, i + 1});
    hit[iota[i]] = i;
  }
  for (const Edge& e : source->edges()) {
    if (iota[e.from] < 0 || iota[e.to] < 0) continue;
    if (!target->has_edge(iota[e.from], iota[e.to]))
      throw Error(ErrorCode::EdgeIncompatible,
                  pair_str(e.from, e.to) + " maps to non-edge " +
                      pair_str(iota[e.from], iota[e.to]),
                  {e.from + 1, e.to + 1});
  }
  const auto& classes = source->classes();
  for (int c = 0; c < static_cast<int>(classes.size()); ++c) {
    auto defined = std::count_if(classes[c].begin(), classes[c].end(),
                                 [&](int i) { return iota[i] >= 0; });
    if (defined != 0 && defined != static_cast<long>(classes[c].size()))
      throw Error(ErrorCode::BlockPartial,
                  "iota is partial on class " + std::to_string(c + 1), {c + 1});
  }
  return MultiplicityOneMap(std::move(source), std::move(target), std::move(iota));
}

bool StandardRegularMap::has_phases() const {
  return std::any_of(phases_.begin(), phases_.end(),
                     [](Complex p) { return p != Complex(1.0, 0.0); });
}

std::vector<UnitTerm> StandardRegularMap::image(int i, int j) const {
  std::vector<UnitTerm> out;
  for (const auto& s : summands_) {
    int a = s(i), b = s(j);
    if (a < 0 || b < 0) continue;
    out.push_back({a, b, phases_[a] * std::conj(phases_[b])});
  }
  std::sort(out.begin(), out.end(), [](const UnitTerm& x, const UnitTerm& y) {
    return std::pair(x.row, x.col) < std::pair(y.row, y.col);
  });
  return out;
}

int StandardRegularMap::rank() const {
  int r = 0;
  for (const auto& s : summands_) r += static_cast<int>(s.image().size());
  return r;
}

std::vector<int> StandardRegularMap::diagonal_support(int i) const {
  std::vector<int> out;
  for (const auto& s : summands_)
    if (s(i) >= 0) out.push_back(s(i));
  std::sort(out.begin(), out.end());
  return out;
}

StandardRegularMap StandardRegularMap::with_phases(std::vector<Complex> phases) const {
  return assemble_regular(source_, target_, summands_, std::move(phases));
}

StandardRegularMap assemble_regular(AlgebraPtr source, AlgebraPtr target,
                                    std::vector<MultiplicityOneMap> summands,
                                    std::vector<Complex> phases) {
  const int n2 = target->size();
  std::vector<int> owner(n2, -1);
  for (int s = 0; s < static_cast<int>(summands.size()); ++s) {
    require_same(*summands[s].source(), *source, "summand source differs");
    require_same(*summands[s].target(), *target, "summand target differs");
    for (int t : summands[s].image()) {
      if (owner[t] >= 0)
        throw Error(ErrorCode::ImageOverlap,
                    "summands " + std::to_string(owner[t] + 1) + " and " +
                        std::to_string(s + 1) + " both hit " + std::to_string(t + 1),
                    {owner[t] + 1, s + 1, t + 1});
      owner[t] = s;
    }
  }
  if (phases.empty()) phases = unit_phases(n2);
  if (static_cast<int>(phases.size()) != n2)
    throw Error(ErrorCode::InvalidInput, "phase vector must cover the target");
  for (int t = 0; t < n2; ++t)
    if (std::abs(std::abs(phases[t]) - 1.0) > 1e-9)
      throw Error(ErrorCode::InvalidInput, "phase is not unimodular", {t + 1});
  return StandardRegularMap(std::move(source), std::move(target), std::move(summands),
                            std::move(phases));
}

std::vector<MultiplicityOneMap> decompose_maximal(const StandardRegularMap& phi) {
  std::vector<MultiplicityOneMap> out;
  const auto& src = *phi.source();
  for (const auto& s : phi.summands())
    for (int c : s.domain_classes()) {
      std::vector<int> iota(src.size(), -1);
      for (int i : src.classes()[c]) iota[i] = s(i);
      out.push_back(validate_multiplicity_one(std::move(iota), phi.source(), phi.target()));
    }
  std::sort(out.begin(), out.end(), [](const MultiplicityOneMap& a, const MultiplicityOneMap& b) {
    auto ka = a.index_map(), kb = b.index_map();
    if (ka != kb) return ka < kb;
    return a.image().front() < b.image().front();
  });
  return out;
}

std::vector<IndexMap> class_multiset(const StandardRegularMap& phi) {
  std::vector<IndexMap> out;
  for (const auto& m : decompose_maximal(phi)) out.push_back(m.index_map());
  std::sort(out.begin(), out.end());
  return out;
}

RankMatrix diagonal_rank_profile(const StandardRegularMap& phi) {
  const auto& tgt = *phi.target();
  RankMatrix out = RankMatrix::Zero(static_cast<int>(tgt.blocks().size()), phi.source()->size());
  for (const auto& s : phi.summands())
    for (int j = 0; j < phi.source()->size(); ++j)
      if (s(j) >= 0) out(tgt.block_of(s(j)), j) += 1;
  return out;
}

StandardRegularMap compose(const StandardRegularMap& phi, const StandardRegularMap& psi) {
  if (!(*psi.target() == *phi.source()))
    throw Error(ErrorCode::SourceTargetMismatch, "target of inner map is not source of outer map");
  const int n0 = psi.source()->size();
  std::vector<Complex> phases = phi.phases();
  std::vector<MultiplicityOneMap> summands;
  for (const auto& s : psi.summands())
    for (const auto& t : phi.summands()) {
      std::vector<int> iota(n0, -1);
      bool any = false;
      for (int i = 0; i < n0; ++i) {
        if (s(i) < 0 || t(s(i)) < 0) continue;
        iota[i] = t(s(i));
        phases[iota[i]] = phi.phases()[iota[i]] * psi.phases()[s(i)];
        any = true;
      }
      if (any)
        summands.push_back(validate_multiplicity_one(std::move(iota), psi.source(), phi.target()));
    }
  return assemble_regular(psi.source(), phi.target(), std::move(summands), std::move(phases));
}

StandardRegularMap direct_sum(const StandardRegularMap& phi, const StandardRegularMap& psi,
                              AlgebraPtr ambient) {
  if (!(*phi.source() == *psi.source()))
    throw Error(ErrorCode::SourceTargetMismatch, "direct sum needs a common source");
  const int n_phi = phi.target()->size();
  const int n_psi = psi.target()->size();
  if (ambient->size() < n_phi + n_psi)
    throw Error(ErrorCode::AmbientTooSmall,
                "ambient has " + std::to_string(ambient->size()) + " indices, need " +
                    std::to_string(n_phi + n_psi),
                {ambient->size(), n_phi + n_psi});
  std::vector<Complex> phases = unit_phases(ambient->size());
  std::vector<MultiplicityOneMap> summands;
  auto place = [&](const StandardRegularMap& m, int offset) {
    for (const auto& s : m.summands()) {
      std::vector<int> iota = s.iota();
      for (int& t : iota)
        if (t >= 0) t += offset;
      summands.push_back(validate_multiplicity_one(std::move(iota), phi.source(), ambient));
    }
    for (int t = 0; t < m.target()->size(); ++t) phases[offset + t] = m.phases()[t];
  };
  place(phi, 0);
  place(psi, n_phi);
  return assemble_regular(phi.source(), std::move(ambient), std::move(summands), std::move(phases));
}

bool same_map(const StandardRegularMap& a, const StandardRegularMap& b) {
  if (!(*a.source() == *b.source()) || !(*a.target() == *b.target())) return false;
  for (const Edge& e : a.source()->edges()) {
    auto x = a.image(e.from, e.to);
    auto y = b.image(e.from, e.to);
    if (x.size() != y.size()) return false;
    for (std::size_t k = 0; k < x.size(); ++k)
      if (x[k].row != y[k].row || x[k].col != y[k].col ||
          std::abs(x[k].coeff - y[k].coeff) > 1e-12)
        return false;
  }
  return true;
}

StandardRegularMap conjugate(const StandardPartialIsometry& v, const StandardRegularMap& phi) {
  const int n2 = phi.target()->size();
  if (v.size() != n2 || !v.is_unitary())
    throw Error(ErrorCode::InvalidInput, "conjugating element must be a unitary of the target");
  std::vector<Complex> phases(n2);
  for (int a = 0; a < n2; ++a) phases[v.target(a)] = v.phase(a) * phi.phases()[a];
  std::vector<MultiplicityOneMap> summands;
  for (const auto& s : phi.summands()) {
    std::vector<int> iota = s.iota();
    for (int& t : iota)
      if (t >= 0) t = v.target(t);
    summands.push_back(validate_multiplicity_one(std::move(iota), phi.source(), phi.target()));
  }
  return assemble_regular(phi.source(), phi.target(), std::move(summands), std::move(phases));
}

StandardPartialIsometry image_of_unitary(const StandardRegularMap& phi,
                                         const StandardPartialIsometry& v) {
  const int n1 = phi.source()->size();
  const int n2 = phi.target()->size();
  if (v.size() != n1 || !v.is_unitary())
    throw Error(ErrorCode::InvalidInput, "expected a unitary of the source");
  std::vector<int> target(n2);
  std::vector<Complex> phases(n2, Complex(1.0, 0.0));
  for (int t = 0; t < n2; ++t) target[t] = t;
  const auto& p = phi.phases();
  for (const auto& s : phi.summands())
    for (int i = 0; i < n1; ++i) {
      if (s(i) < 0) continue;
      int x = s(i), y = s(v.target(i));
      if (y < 0)
        throw Error(ErrorCode::InvalidInput, "unitary leaves a class of the source");
      target[x] = y;
      phases[x] = v.phase(i) * p[y] * std::conj(p[x]);
    }
  return StandardPartialIsometry(n2, std::move(target), std::move(phases));
}

NumericStarMap::NumericStarMap(AlgebraPtr source, AlgebraPtr target, ImageMap images,
                               double tolerance)
    : source_(std::move(source)),
      target_(std::move(target)),
      images_(std::move(images)),
      tolerance_(tolerance) {
  const int n2 = target_->size();
  for (const Edge& e : source_->edges()) {
    auto it = images_.find({e.from, e.to});
    if (it == images_.end())
      throw Error(ErrorCode::InvalidInput, "missing image of e" + pair_str(e.from, e.to),
                  {e.from + 1, e.to + 1});
    if (it->second.rows() != n2 || it->second.cols() != n2)
      throw Error(ErrorCode::InvalidInput, "image of e" + pair_str(e.from, e.to) +
                                               " has the wrong shape",
                  {e.from + 1, e.to + 1});
  }
  for (const auto& [key, m] : images_)
    if (!source_->has_edge(key.first, key.second))
      throw Error(ErrorCode::InvalidInput, "image given for non-edge " +
                                               pair_str(key.first, key.second));
}

const Matrix& NumericStarMap::image(int i, int j) const { return images_.at({i, j}); }

Matrix NumericStarMap::envelope_image(int i, int j) const {
  if (source_->has_edge(i, j)) return images_.at({i, j});
  if (source_->has_edge(j, i)) return images_.at({j, i}).adjoint();
  throw Error(ErrorCode::InvalidInput, "no matrix unit " + pair_str(i, j) + " in A + A*");
}

Matrix NumericStarMap::apply(const Matrix& a) const {
  Matrix out = Matrix::Zero(target_size(), target_size());
  for (const auto& [key, m] : images_) {
    Complex c = a(key.first, key.second);
    if (c != Complex(0.0, 0.0)) out += c * m;
  }
  return out;
}

Matrix NumericStarMap::unit_image() const {
  Matrix out = Matrix::Zero(target_size(), target_size());
  for (int i = 0; i < source_->size(); ++i) out += images_.at({i, i});
  return out;
}

NumericStarMap to_numeric(const StandardRegularMap& phi,
                          std::optional<std::span<const Complex>> phases) {
  const int n2 = phi.target()->size();
  const StandardRegularMap* m = &phi;
  std::optional<StandardRegularMap> phased;
  if (phases) {
    if (static_cast<int>(phases->size()) != n2)
      throw Error(ErrorCode::InvalidInput, "phase vector must cover the target");
    std::vector<Complex> p(n2);
    for (int t = 0; t < n2; ++t) p[t] = phi.phases()[t] * (*phases)[t];
    phased = phi.with_phases(std::move(p));
    m = &*phased;
  }
  NumericStarMap::ImageMap images;
  for (const Edge& e : phi.source()->edges()) {
    Matrix x = Matrix::Zero(n2, n2);
    for (const UnitTerm& u : m->image(e.from, e.to)) x(u.row, u.col) += u.coeff;
    images.emplace(std::pair(e.from, e.to), std::move(x));
  }
  return NumericStarMap(phi.source(), phi.target(), std::move(images), 0.0);
}

NumericStarMap validate_numeric(NumericStarMap::ImageMap images, AlgebraPtr source,
                                AlgebraPtr target, double tol) {
  if (tol < 0) throw Error(ErrorCode::InvalidInput, "tolerance must be nonnegative");
  NumericStarMap phi(source, target, std::move(images), tol);
  const auto& A = *source;
  const auto& B = *target;
  const int n1 = A.size();
  const int n2 = B.size();

  for (const Edge& e : A.edges()) {
    Matrix outside = phi.image(e.from, e.to);
    for (int a = 0; a < n2; ++a)
      for (int b = 0; b < n2; ++b)
        if (B.has_edge(a, b)) outside(a, b) = 0.0;
    double r = residual_norm(outside, tol);
    if (r > tol)
      throw Error(ErrorCode::NotInRange, "image of e" + pair_str(e.from, e.to) +
                                             " leaves the target algebra",
                  {e.from + 1, e.to + 1}, r);
  }

  for (const Edge& e : A.edges()) {
    if (e.from >= e.to || !A.has_edge(e.to, e.from)) continue;
    double r = residual_norm(phi.image(e.to, e.from) - phi.image(e.from, e.to).adjoint(), tol);
    if (r > tol)
      throw Error(ErrorCode::NotStarConsistent,
                  "image of e" + pair_str(e.to, e.from) + " is not the adjoint",
                  {e.from + 1, e.to + 1}, r);
  }

  auto sym = [&](int i, int j) { return A.has_edge(i, j) || A.has_edge(j, i); };
  auto fail_mult = [&](int i, int j, int k, int l, double r) {
    throw Error(ErrorCode::NotMultiplicative,
                "e" + pair_str(i, j) + " e" + pair_str(k, l) + " residual " + std::to_string(r),
                {i + 1, j + 1, k + 1, l + 1}, r);
  };

  // Products e_ij e_jl = e_il inside A + A*.
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n1; ++j) {
      if (!sym(i, j)) continue;
      Matrix xij = phi.envelope_image(i, j);
      for (int l = 0; l < n1; ++l) {
        if (!sym(j, l) || !sym(i, l)) continue;
        double r = residual_norm(xij * phi.envelope_image(j, l) - phi.envelope_image(i, l), tol);
        if (r > tol) fail_mult(i, j, j, l, r);
      }
    }
  // e_ii e_kk = 0.
  for (int i = 0; i < n1; ++i)
    for (int k = i + 1; k < n1; ++k) {
      double r = residual_norm(phi.image(i, i) * phi.image(k, k), tol);
      if (r > tol) fail_mult(i, i, k, k, r);
    }
  // Consistency around cycles: every unit agrees with the product through the
  // root of a spanning tree of its class.
  for (const auto& cls : A.classes()) {
    const int root = cls.front();
    std::vector<Matrix> down(n1);  // image of e_{i,root}
    std::vector<char> seen(n1, 0);
    std::deque<int> queue{root};
    seen[root] = 1;
    down[root] = phi.image(root, root);
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int w = 0; w < n1; ++w)
        if (!seen[w] && sym(w, u)) {
          seen[w] = 1;
          down[w] = phi.envelope_image(w, u) * down[u];
          queue.push_back(w);
        }
    }
    for (int i : cls)
      for (int l : cls) {
        if (!sym(i, l)) continue;
        double r = residual_norm(phi.envelope_image(i, l) - down[i] * down[l].adjoint(), tol);
        if (r > tol) fail_mult(i, root, root, l, r);
      }
  }
  return phi;
}

NumericStarMap conjugate(const Matrix& u, const NumericStarMap& phi) {
  NumericStarMap::ImageMap images;
  Matrix ua = u.adjoint();
  for (const auto& [key, m] : phi.images()) images.emplace(key, u * m * ua);
  return NumericStarMap(phi.source(), phi.target(), std::move(images), phi.tolerance());
}

NumericStarMap compose(const NumericStarMap& outer, const NumericStarMap& inner) {
  if (!(*inner.target() == *outer.source()))
    throw Error(ErrorCode::SourceTargetMismatch, "target of inner map is not source of outer map");
  NumericStarMap::ImageMap images;
  for (const auto& [key, m] : inner.images()) images.emplace(key, outer.apply(m));
  return NumericStarMap(inner.source(), outer.target(), std::move(images),
                        std::max(outer.tolerance(), inner.tolerance()));
}

NumericStarMap compose(const NumericStarMap& outer, const StandardRegularMap& inner) {
  if (!(*inner.target() == *outer.source()))
    throw Error(ErrorCode::SourceTargetMismatch, "target of inner map is not source of outer map");
  const int n3 = outer.target_size();
  NumericStarMap::ImageMap images;
  for (const Edge& e : inner.source()->edges()) {
    Matrix x = Matrix::Zero(n3, n3);
    for (const UnitTerm& t : inner.image(e.from, e.to)) x += t.coeff * outer.image(t.row, t.col);
    images.emplace(std::pair(e.from, e.to), std::move(x));
  }
  return NumericStarMap(inner.source(), outer.target(), std::move(images), outer.tolerance());
}

Matrix image_of_unitary(const NumericStarMap& phi, const Matrix& u) {
  const int n2 = phi.target_size();
  return phi.apply(u) + Matrix::Identity(n2, n2) - phi.unit_image();
}

double map_distance(const NumericStarMap& a, const NumericStarMap& b) {
  if (!(*a.source() == *b.source()) || a.target_size() != b.target_size())
    throw Error(ErrorCode::SourceTargetMismatch, "maps are not parallel");
  double d = 0.0;
  for (const auto& [key, m] : a.images()) d = std::max(d, operator_norm(m - b.images().at(key)));
  return d;
}

}  // namespace limitalg
