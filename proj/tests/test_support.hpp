#pragma once

// Generators and independent oracles shared by the unit tests and the
// acceptance binary. Everything is seeded; nothing here calls back into the
// routines it is used to check unless noted.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "limitalg/conjugacy.hpp"
#include "limitalg/core.hpp"
#include "limitalg/dimmod.hpp"
#include "limitalg/homs.hpp"
#include "limitalg/intertwine.hpp"
#include "limitalg/spectrum.hpp"
#include "limitalg/system.hpp"

namespace support {

using namespace limitalg;
using Rng = std::mt19937_64;

inline int uniform(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double real(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p = 0.5) { return real(rng) < p; }

inline Complex random_phase(Rng& rng) { return std::polar(1.0, real(rng, 0.0, 2 * M_PI)); }

inline Complex random_quarter_phase(Rng& rng) {
  static const Complex q[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return q[uniform(rng, 0, 3)];
}

inline double opnorm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

// Random preorder on n points: blocks are random classes of indices, the
// order on blocks is the transitive closure of a random DAG.
inline AlgebraPtr random_digraph_algebra(Rng& rng, int n) {
  const int nb = uniform(rng, 1, n);
  std::vector<int> block(n);
  for (int i = 0; i < n; ++i) block[i] = i < nb ? i : uniform(rng, 0, nb - 1);
  std::shuffle(block.begin(), block.end(), rng);
  std::vector<std::vector<char>> le(nb, std::vector<char>(nb, 0));
  for (int a = 0; a < nb; ++a) {
    le[a][a] = 1;
    for (int b = a + 1; b < nb; ++b) le[a][b] = coin(rng, 0.4);
  }
  for (int k = 0; k < nb; ++k)
    for (int a = 0; a < nb; ++a)
      for (int b = 0; b < nb; ++b)
        if (le[a][k] && le[k][b]) le[a][b] = 1;
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (le[block[i]][block[j]]) edges.push_back({i, j});
  return build_digraph_algebra(n, edges);
}

// Direct sums of nest algebras: bands[s] lists the band sizes of summand s.
struct Layout {
  std::vector<std::vector<int>> bands;

  int summand_offset(int s) const {
    int o = 0;
    for (int k = 0; k < s; ++k) o += std::accumulate(bands[k].begin(), bands[k].end(), 0);
    return o;
  }
  int index(int s, int band, int pos) const {
    int o = summand_offset(s);
    for (int t = 0; t < band; ++t) o += bands[s][t];
    return o + pos;
  }
  int block(int s, int band) const {
    int b = 0;
    for (int k = 0; k < s; ++k) b += static_cast<int>(bands[k].size());
    return b + band;
  }
  int block_count() const { return block(static_cast<int>(bands.size()), 0); }
  int size() const { return summand_offset(static_cast<int>(bands.size())); }
};

inline Layout tr_layout(int r, std::vector<int> multiplicities) {
  Layout l;
  for (int m : multiplicities) l.bands.push_back(std::vector<int>(r, m));
  return l;
}

inline AlgebraPtr layout_algebra(const Layout& l) {
  std::vector<AlgebraPtr> parts;
  for (const auto& b : l.bands) parts.push_back(nest_algebra(b));
  return direct_sum(parts);
}

// One multiplicity-one summand: source summand s into target summand c,
// source band t going to target band theta[t].
struct Copy {
  int source;
  int target;
  std::vector<int> theta;
};

struct GeneratedMap {
  StandardRegularMap map;
  std::vector<Copy> copies;
};

// Places copies on free slots: random slots when rng is given, otherwise the
// lowest free ones. Returns false when a copy does not fit.
inline bool place(const Layout& S, const Layout& T, const std::vector<Copy>& copies, Rng* rng,
                  std::vector<std::vector<int>>& iotas) {
  std::vector<char> used(T.size(), 0);
  iotas.clear();
  for (const Copy& c : copies) {
    std::vector<int> iota(S.size(), -1);
    for (int t = 0; t < static_cast<int>(S.bands[c.source].size()); ++t) {
      const int u = c.theta[t];
      std::vector<int> free;
      for (int p = 0; p < T.bands[c.target][u]; ++p)
        if (!used[T.index(c.target, u, p)]) free.push_back(T.index(c.target, u, p));
      if (static_cast<int>(free.size()) < S.bands[c.source][t]) return false;
      if (rng) std::shuffle(free.begin(), free.end(), *rng);
      for (int p = 0; p < S.bands[c.source][t]; ++p) {
        iota[S.index(c.source, t, p)] = free[p];
        used[free[p]] = 1;
      }
    }
    iotas.push_back(std::move(iota));
  }
  return true;
}

inline StandardRegularMap build_map(const AlgebraPtr& sa, const AlgebraPtr& ta,
                                    const std::vector<std::vector<int>>& iotas,
                                    std::vector<Complex> phases = {}) {
  std::vector<MultiplicityOneMap> summands;
  for (const auto& iota : iotas) summands.push_back(validate_multiplicity_one(iota, sa, ta));
  return assemble_regular(sa, ta, std::move(summands), std::move(phases));
}

inline std::vector<int> random_monotone(Rng& rng, int r, int s) {
  std::vector<int> v(r);
  for (auto& x : v) x = uniform(rng, 0, s - 1);
  std::sort(v.begin(), v.end());
  return v;
}

enum class Phases { None, Quarter, Any };

inline std::vector<Complex> random_phases(Rng& rng, int n, Phases kind) {
  if (kind == Phases::None) return {};
  std::vector<Complex> p(n);
  for (auto& z : p) z = kind == Phases::Quarter ? random_quarter_phase(rng) : random_phase(rng);
  return p;
}

inline GeneratedMap random_layout_map(Rng& rng, const Layout& S, const Layout& T,
                                      const AlgebraPtr& sa, const AlgebraPtr& ta,
                                      int max_copies, Phases phases = Phases::None,
                                      bool random_slots = true) {
  std::vector<Copy> copies;
  std::vector<std::vector<int>> iotas;
  const int wanted = uniform(rng, 0, max_copies);
  for (int attempt = 0; attempt < 4 * max_copies + 4 && static_cast<int>(copies.size()) < wanted;
       ++attempt) {
    Copy c;
    c.source = uniform(rng, 0, static_cast<int>(S.bands.size()) - 1);
    c.target = uniform(rng, 0, static_cast<int>(T.bands.size()) - 1);
    c.theta = random_monotone(rng, static_cast<int>(S.bands[c.source].size()),
                              static_cast<int>(T.bands[c.target].size()));
    copies.push_back(c);
    if (!place(S, T, copies, nullptr, iotas)) copies.pop_back();
  }
  place(S, T, copies, random_slots ? &rng : nullptr, iotas);
  return {build_map(sa, ta, iotas, random_phases(rng, T.size(), phases)), copies};
}

inline IndexMap copy_index_map(const Layout& S, const Layout& T, const Copy& c) {
  IndexMap pi{std::vector<int>(S.block_count(), -1)};
  for (int t = 0; t < static_cast<int>(c.theta.size()); ++t)
    pi.pi[S.block(c.source, t)] = T.block(c.target, c.theta[t]);
  return pi;
}

inline std::vector<IndexMap> expected_multiset(const Layout& S, const Layout& T,
                                               const std::vector<Copy>& copies) {
  std::vector<IndexMap> out;
  for (const auto& c : copies) out.push_back(copy_index_map(S, T, c));
  std::sort(out.begin(), out.end());
  return out;
}

// Copies of φ∘ψ from the copies of ψ (S → T) and φ (T → U).
inline std::vector<Copy> compose_copies(const std::vector<Copy>& phi,
                                        const std::vector<Copy>& psi) {
  std::vector<Copy> out;
  for (const Copy& a : psi)
    for (const Copy& b : phi)
      if (b.source == a.target) {
        Copy c{a.source, b.target, {}};
        for (int t : a.theta) c.theta.push_back(b.theta[t]);
        out.push_back(c);
      }
  return out;
}

// Dense image of e_ij straight from the summand data.
inline Matrix dense_image(const StandardRegularMap& phi, int i, int j) {
  const int n = phi.target()->size();
  Matrix m = Matrix::Zero(n, n);
  const auto& p = phi.phases();
  for (const auto& s : phi.summands())
    if (s.defined(i) && s.defined(j)) m(s(i), s(j)) += p[s(i)] * std::conj(p[s(j)]);
  return m;
}

inline Matrix random_unitary(Rng& rng, int n) {
  std::normal_distribution<double> g;
  Matrix z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) q.col(k) *= std::polar(1.0, std::arg(r(k, k)));
  return q;
}

// A random unitary of A ∩ A*: independent unitaries on the blocks.
inline Matrix random_block_unitary(Rng& rng, const DigraphAlgebra& a) {
  Matrix u = Matrix::Zero(a.size(), a.size());
  for (const auto& b : a.blocks()) {
    Matrix w = random_unitary(rng, static_cast<int>(b.size()));
    for (std::size_t x = 0; x < b.size(); ++x)
      for (std::size_t y = 0; y < b.size(); ++y) u(b[x], b[y]) = w(x, y);
  }
  return u;
}

inline Matrix random_block_hermitian(Rng& rng, const DigraphAlgebra& a) {
  std::normal_distribution<double> g;
  Matrix h = Matrix::Zero(a.size(), a.size());
  for (const auto& b : a.blocks())
    for (int x : b)
      for (int y : b) h(x, y) = Complex(g(rng), g(rng));
  Matrix s = (h + h.adjoint()) / 2.0;
  return s / opnorm(s);
}

inline Matrix exp_i(const Matrix& h, double eps) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Eigen::VectorXcd d = (Complex(0, eps) * es.eigenvalues().cast<Complex>()).array().exp();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

inline std::vector<int> block_permutation(Rng& rng, const DigraphAlgebra& a) {
  std::vector<int> perm(a.size());
  for (const auto& b : a.blocks()) {
    std::vector<int> img = b;
    std::shuffle(img.begin(), img.end(), rng);
    for (std::size_t k = 0; k < b.size(); ++k) perm[b[k]] = img[k];
  }
  return perm;
}

inline StandardPartialIsometry random_standard_unitary(Rng& rng, const DigraphAlgebra& a,
                                                       Phases phases) {
  auto p = random_phases(rng, a.size(), phases);
  return StandardPartialIsometry(a.size(), block_permutation(rng, a), p);
}

// Ad(u) applied to every image, without going through the library.
inline NumericStarMap conjugated(const Matrix& u, const NumericStarMap& phi) {
  NumericStarMap::ImageMap out;
  for (const auto& [k, m] : phi.images()) out.emplace(k, u * m * u.adjoint());
  return NumericStarMap(phi.source(), phi.target(), std::move(out), phi.tolerance());
}

inline NumericStarMap dense_numeric(const StandardRegularMap& phi) {
  NumericStarMap::ImageMap out;
  for (const Edge& e : phi.source()->edges())
    out.emplace(std::pair{e.from, e.to}, dense_image(phi, e.from, e.to));
  return NumericStarMap(phi.source(), phi.target(), std::move(out));
}

inline double unit_distance(const NumericStarMap& a, const NumericStarMap& b) {
  double d = 0.0;
  for (const auto& [k, m] : a.images()) d = std::max(d, opnorm(m - b.images().at(k)));
  return d;
}

inline Matrix envelope(const NumericStarMap& phi, int i, int j) {
  auto it = phi.images().find({i, j});
  if (it != phi.images().end()) return it->second;
  return phi.images().at({j, i}).adjoint();
}

// Regularity oracle for a numeric map whose source classes are connected:
// transport every block projection of the target back to the range of a root
// unit φ(e_{r r}); the map splits into multiplicity-one summands exactly when
// all of these compressions commute.
inline bool commuting_projection_oracle(const NumericStarMap& phi, double tol = 1e-7) {
  const DigraphAlgebra& a = *phi.source();
  const DigraphAlgebra& b = *phi.target();
  for (const auto& cls : a.classes()) {
    const int root = cls.front();
    Eigen::SelfAdjointEigenSolver<Matrix> es(envelope(phi, root, root));
    std::vector<int> keep;
    for (int k = 0; k < es.eigenvalues().size(); ++k)
      if (es.eigenvalues()(k) > 0.5) keep.push_back(k);
    if (keep.empty()) continue;
    Matrix f(b.size(), keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) f.col(k) = es.eigenvectors().col(keep[k]);
    std::vector<Matrix> q;
    for (int i : cls) {
      Matrix j = envelope(phi, i, root) * f;
      for (const auto& blk : b.blocks()) {
        Matrix p = Matrix::Zero(b.size(), b.size());
        for (int x : blk) p(x, x) = 1.0;
        q.push_back(j.adjoint() * p * j);
      }
    }
    for (std::size_t x = 0; x < q.size(); ++x)
      for (std::size_t y = x + 1; y < q.size(); ++y)
        if (opnorm(q[x] * q[y] - q[y] * q[x]) > tol) return false;
  }
  return true;
}

// T_3 → nest(2,3,1) with φ(e_11), φ(e_22), φ(e_33) onto span{e1,e3},
// span{e2,e4}, span{e5,e6}, the second of these rotated by t against the
// band decomposition. Regular exactly when t is a multiple of π/2.
inline NumericStarMap t3_rotated(double t) {
  auto src = tr_algebra(3);
  const int bands[] = {2, 3, 1};
  auto tgt = nest_algebra(bands);
  Matrix x12 = Matrix::Zero(6, 6), x23 = Matrix::Zero(6, 6);
  x12(0, 1) = 1;
  x12(2, 3) = 1;
  x23(1, 4) = std::cos(t);
  x23(3, 4) = std::sin(t);
  x23(1, 5) = std::sin(t);
  x23(3, 5) = -std::cos(t);
  NumericStarMap::ImageMap im;
  im[{0, 1}] = x12;
  im[{1, 2}] = x23;
  im[{0, 2}] = x12 * x23;
  im[{0, 0}] = x12 * x12.adjoint();
  im[{1, 1}] = x23 * x23.adjoint();
  im[{2, 2}] = x23.adjoint() * x23;
  return NumericStarMap(src, tgt, std::move(im));
}

inline Layout t3_target_layout() { return Layout{{{2, 3, 1}}}; }

// 1_r ⊗ V on T_r ⊗ M_m, V = Σ d_p e_{σ(p), p}. Commutes with the image of
// the first refinement connector when m = 2.
inline StandardPartialIsometry band_twist(int r, const std::vector<int>& sigma,
                                          const std::vector<Complex>& d) {
  const int m = static_cast<int>(sigma.size());
  std::vector<int> target(r * m);
  std::vector<Complex> phases(r * m);
  for (int b = 0; b < r; ++b)
    for (int p = 0; p < m; ++p) {
      target[b * m + p] = b * m + sigma[p];
      phases[b * m + p] = d[p];
    }
  return StandardPartialIsometry(r * m, target, phases);
}

inline Matrix dense_band_twist(int r, const Matrix& y) {
  const int m = static_cast<int>(y.rows());
  Matrix x = Matrix::Zero(r * m, r * m);
  for (int b = 0; b < r; ++b) x.block(b * m, b * m, m, m) = y;
  return x;
}

// φ(x) for x in the span of the symmetric support of the source, φ unital.
inline Matrix dense_apply(const StandardRegularMap& phi, const Matrix& x) {
  const int n = phi.target()->size();
  Matrix out = Matrix::Zero(n, n);
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j)
      if (x(i, j) != Complex(0)) out += x(i, j) * dense_image(phi, i, j);
  return out;
}

// Commutant of the refinement image of stage k in stage k+1 of a T_r
// refinement system: y acts on the copy index, m is the stage-k band size.
inline Matrix refinement_commutant(int r, int m, const Matrix& y) {
  const int n = r * 2 * m;
  Matrix c = Matrix::Zero(n, n);
  for (int b = 0; b < r; ++b)
    for (int pos = 0; pos < m; ++pos)
      for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t) c(b * 2 * m + s * m + pos, b * 2 * m + t * m + pos) = y(s, t);
  return c;
}

// Two T_r refinement systems over `stages` stages, the bottom one conjugated
// stagewise by random standard unitaries P_k, with crossovers
//   α_k = Ad(P_k), β_k = φ_k ∘ Ad(P_k*)
// so both triangles commute exactly. With `numeric`, the crossovers are further
// twisted by dense unitaries Z_k chosen so that the diagram still commutes.
inline CrossoverDiagram twisted_refinement_diagram(Rng& rng, int r, int stages, bool numeric,
                                                   Phases phases = Phases::Any) {
  CrossoverDiagram d;
  d.top = tr_refinement_system(r, stages);
  d.bottom.stages = d.top.stages;
  std::vector<StandardPartialIsometry> p;
  for (const auto& a : d.top.stages) p.push_back(random_standard_unitary(rng, *a, phases));
  std::vector<StandardRegularMap> alpha, beta;
  for (int k = 0; k < stages; ++k) {
    const auto& a = d.top.stages[k];
    alpha.push_back(conjugate(p[k], identity_map(a)));
    if (k + 1 < stages) {
      beta.push_back(compose(d.top.connectors[k], conjugate(p[k].adjoint(), identity_map(a))));
      d.bottom.connectors.push_back(conjugate(p[k + 1], beta.back()));
    }
    d.n.push_back(k);
    d.m.push_back(k);
  }
  if (!numeric) {
    d.alphas.assign(alpha.begin(), alpha.end());
    d.betas.assign(beta.begin(), beta.end());
    return d;
  }
  std::vector<Matrix> z{random_block_unitary(rng, *d.top.stages[0])};
  for (int k = 0; k + 1 < stages; ++k) {
    const int m = d.top.stages[k]->size() / r;
    Matrix c0 = refinement_commutant(r, m, random_unitary(rng, 2));
    Matrix pk = p[k + 1].to_dense();
    z.push_back(dense_apply(d.bottom.connectors[k], z[k]) * pk * c0 * pk.adjoint());
  }
  for (int k = 0; k < stages; ++k) {
    d.alphas.push_back(conjugated(z[k], to_numeric(alpha[k])));
    if (k + 1 < stages)
      d.betas.push_back(
          conjugated(dense_apply(beta[k], z[k].adjoint()), to_numeric(beta[k])));
  }
  return d;
}

// Brute-force inner equivalence: some block-preserving permutation with
// ±1 phases conjugates a onto b (enough when all phases are ±1).
inline bool brute_force_equivalent(const StandardRegularMap& a, const StandardRegularMap& b) {
  const DigraphAlgebra& t = *a.target();
  const int n = t.size();
  std::vector<std::vector<int>> per_block;
  for (const auto& blk : t.blocks()) per_block.push_back(blk);
  std::vector<Matrix> ia, ib;
  for (const Edge& e : a.source()->edges()) {
    ia.push_back(dense_image(a, e.from, e.to));
    ib.push_back(dense_image(b, e.from, e.to));
  }
  // Iterate over products of per-block permutations.
  std::vector<std::vector<int>> current = per_block;
  for (auto& c : current) std::sort(c.begin(), c.end());
  while (true) {
    std::vector<int> perm(n);
    for (std::size_t k = 0; k < per_block.size(); ++k)
      for (std::size_t x = 0; x < per_block[k].size(); ++x) perm[per_block[k][x]] = current[k][x];
    for (int mask = 0; mask < (1 << n); ++mask) {
      Matrix v = Matrix::Zero(n, n);
      for (int i = 0; i < n; ++i) v(perm[i], i) = (mask >> i & 1) ? -1.0 : 1.0;
      bool ok = true;
      for (std::size_t e = 0; ok && e < ia.size(); ++e)
        ok = (v * ia[e] * v.adjoint() - ib[e]).cwiseAbs().maxCoeff() < 1e-12;
      if (ok) return true;
    }
    std::size_t k = 0;
    for (; k < current.size(); ++k) {
      if (std::next_permutation(current[k].begin(), current[k].end())) break;
      std::sort(current[k].begin(), current[k].end());
    }
    if (k == current.size()) return false;
  }
}


// Dimension modules.

inline SemiringElement random_element(Rng& rng, int r, const std::vector<MonotoneMap>& basis) {
  SemiringElement x(r);
  const int terms = uniform(rng, 0, 3);
  for (int t = 0; t < terms; ++t)
    x = x + SemiringElement::of(basis[uniform(rng, 0, static_cast<int>(basis.size()) - 1)],
                                uniform(rng, 1, 3));
  return x;
}

inline StageModule random_module(Rng& rng, int r, int n, const std::vector<MonotoneMap>& basis) {
  StageModule x;
  for (int b = 0; b < n; ++b) x.push_back(random_element(rng, r, basis));
  return x;
}

inline TrShape shape_of(const Layout& l) {
  TrShape s{static_cast<int>(l.bands.front().size()), {}};
  for (const auto& b : l.bands) s.multiplicities.push_back(b.front());
  return s;
}

inline Layout random_tr_layout(Rng& rng, int r, int lo, int hi) {
  std::vector<int> mults(uniform(rng, 1, 2));
  for (auto& m : mults) m = uniform(rng, lo, hi);
  return tr_layout(r, mults);
}

// Class matrix straight from the generating copies.
inline ModuleMapMatrix copies_class(const Layout& S, const Layout& T,
                                    const std::vector<Copy>& copies) {
  const int r = static_cast<int>(S.bands.front().size());
  auto m = zero_matrix(r, static_cast<int>(T.bands.size()), static_cast<int>(S.bands.size()));
  for (const auto& c : copies) {
    std::vector<int> v;
    for (int t : c.theta) v.push_back(t + 1);
    m.at(c.target, c.source) = m.at(c.target, c.source) + SemiringElement::of(make_monotone(v));
  }
  return m;
}

// r = 1 systems given by multiplicity matrices between shapes.
struct GoldenSystem {
  std::vector<std::vector<int>> shapes;
  std::vector<Eigen::MatrixXi> matrices;  // target summands x source summands
};

inline LimitPresentation present(const GoldenSystem& g) {
  DirectSystem sys;
  std::vector<Layout> layouts;
  std::vector<TrShape> shapes;
  for (const auto& s : g.shapes) {
    layouts.push_back(tr_layout(1, s));
    shapes.push_back(TrShape{1, s});
    sys.stages.push_back(tr_stage(shapes.back()));
  }
  for (std::size_t k = 0; k < g.matrices.size(); ++k) {
    std::vector<Copy> copies;
    for (int c = 0; c < g.matrices[k].rows(); ++c)
      for (int b = 0; b < g.matrices[k].cols(); ++b)
        for (int n = 0; n < g.matrices[k](c, b); ++n) copies.push_back({b, c, {0}});
    std::vector<std::vector<int>> iotas;
    if (!place(layouts[k], layouts[k + 1], copies, nullptr, iotas))
      throw std::logic_error("golden system does not fit");
    sys.connectors.push_back(build_map(sys.stages[k], sys.stages[k + 1], iotas));
  }
  return LimitPresentation(sys, shapes);
}

inline StageModule k0(const Eigen::VectorXi& v) {
  StageModule x;
  for (int i = 0; i < v.size(); ++i)
    x.push_back(v(i) ? SemiringElement::of(identity_monotone(1), static_cast<std::uint64_t>(v(i)))
                     : SemiringElement::zero(1));
  return x;
}

// Direct systems.

// Random T_r-shaped system with growing multiplicities and random connectors.
inline DirectSystem random_system(Rng& rng, int count, Phases phases) {
  const int r = uniform(rng, 1, 3);
  std::vector<Layout> layouts;
  DirectSystem sys;
  int m = 1;
  for (int k = 0; k < count; ++k) {
    Layout l = tr_layout(r, {m});
    if (k > 0 && coin(rng, 0.3)) l.bands.push_back(std::vector<int>(r, 1));
    layouts.push_back(l);
    sys.stages.push_back(layout_algebra(l));
    m += uniform(rng, 1, 2);
  }
  for (int k = 0; k + 1 < count; ++k)
    sys.connectors.push_back(random_layout_map(rng, layouts[k], layouts[k + 1], sys.stages[k],
                                               sys.stages[k + 1], 3, phases)
                                 .map);
  return sys;
}

inline DirectSystem rephased(Rng& rng, const DirectSystem& sys) {
  DirectSystem out = sys;
  for (auto& c : out.connectors)
    c = c.with_phases(random_phases(rng, c.target()->size(), Phases::Any));
  return out;
}

}  // namespace support
