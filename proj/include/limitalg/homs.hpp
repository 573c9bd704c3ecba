#pragma once

// Star-extendible homomorphisms between digraph algebras: the combinatorial
// multiplicity-one and standard regular forms, and general numeric maps
// given by the images of matrix units.

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "limitalg/core.hpp"

namespace limitalg {

inline constexpr double kDefaultTolerance = 1e-9;

/// Inner-conjugacy class of a multiplicity-one map: source block ↦ target
/// block, -1 where undefined.
struct IndexMap {
  std::vector<int> pi;

  bool defined(int block) const { return pi[block] >= 0; }
  friend auto operator<=>(const IndexMap&, const IndexMap&) = default;
};

/// e_ij ↦ e_{iota(i) iota(j)} on the classes where iota is defined.
class MultiplicityOneMap {
 public:
  const AlgebraPtr& source() const noexcept { return source_; }
  const AlgebraPtr& target() const noexcept { return target_; }
  const std::vector<int>& iota() const noexcept { return iota_; }
  int operator()(int i) const { return iota_[i]; }
  bool defined(int i) const { return iota_[i] >= 0; }

  IndexMap index_map() const;
  /// Target indices hit, ascending.
  std::vector<int> image() const;
  /// Source classes in the domain, ascending.
  std::vector<int> domain_classes() const;

  friend bool operator==(const MultiplicityOneMap& a, const MultiplicityOneMap& b) {
    return a.iota_ == b.iota_ && *a.source_ == *b.source_ && *a.target_ == *b.target_;
  }

 private:
  friend MultiplicityOneMap validate_multiplicity_one(std::vector<int>, AlgebraPtr,
                                                      AlgebraPtr);
  MultiplicityOneMap(AlgebraPtr s, AlgebraPtr t, std::vector<int> iota)
      : source_(std::move(s)), target_(std::move(t)), iota_(std::move(iota)) {}

  AlgebraPtr source_;
  AlgebraPtr target_;
  std::vector<int> iota_;
};

/// iota[i] < 0 leaves i out of the domain. Throws NotInjective,
/// EdgeIncompatible(i,j) or BlockPartial(class).
MultiplicityOneMap validate_multiplicity_one(std::vector<int> iota, AlgebraPtr source,
                                             AlgebraPtr target);

/// A phased matrix unit c·e_{row,col}.
struct UnitTerm {
  int row;
  int col;
  Complex coeff;
};

/// A direct sum of multiplicity-one maps with disjoint images, followed by
/// conjugation with a diagonal unitary D = diag(phases):
///   e_ij ↦ Σ_s d_{ι_s(i)} conj(d_{ι_s(j)}) e_{ι_s(i) ι_s(j)}.
/// With trivial phases this is the plain combinatorial form.
class StandardRegularMap {
 public:
  const AlgebraPtr& source() const noexcept { return source_; }
  const AlgebraPtr& target() const noexcept { return target_; }
  const std::vector<MultiplicityOneMap>& summands() const noexcept { return summands_; }
  /// One unimodular entry per target index.
  const std::vector<Complex>& phases() const noexcept { return phases_; }
  bool has_phases() const;

  /// Image of e_ij for (i,j) in the symmetric support of the source.
  std::vector<UnitTerm> image(int i, int j) const;
  /// Total rank of the image of the identity.
  int rank() const;
  /// Target indices carrying the image of e_ii.
  std::vector<int> diagonal_support(int i) const;

  StandardRegularMap with_phases(std::vector<Complex> phases) const;

 private:
  friend StandardRegularMap assemble_regular(AlgebraPtr, AlgebraPtr,
                                             std::vector<MultiplicityOneMap>,
                                             std::vector<Complex>);
  StandardRegularMap(AlgebraPtr s, AlgebraPtr t, std::vector<MultiplicityOneMap> m,
                     std::vector<Complex> p)
      : source_(std::move(s)),
        target_(std::move(t)),
        summands_(std::move(m)),
        phases_(std::move(p)) {}

  AlgebraPtr source_;
  AlgebraPtr target_;
  std::vector<MultiplicityOneMap> summands_;
  std::vector<Complex> phases_;
};

/// Throws ImageOverlap(s, s', index) (1-based) when two summand images meet,
/// SourceTargetMismatch when summands disagree with source/target.
StandardRegularMap assemble_regular(AlgebraPtr source, AlgebraPtr target,
                                    std::vector<MultiplicityOneMap> summands,
                                    std::vector<Complex> phases = {});

/// Finest decomposition: one summand per (summand, source class) pair,
/// sorted by index map and then by least image index.
std::vector<MultiplicityOneMap> decompose_maximal(const StandardRegularMap& phi);

/// Sorted index-map multiset of the maximal decomposition.
std::vector<IndexMap> class_multiset(const StandardRegularMap& phi);

/// rank(E_r φ(e_jj) E_r) for target block r and source index j.
RankMatrix diagonal_rank_profile(const StandardRegularMap& phi);

/// phi ∘ psi. Throws SourceTargetMismatch unless target(psi) == source(phi).
StandardRegularMap compose(const StandardRegularMap& phi, const StandardRegularMap& psi);

/// phi ⊕ psi into ambient, phi on indices [0, n_phi) and psi on
/// [n_phi, n_phi + n_psi). Throws AmbientTooSmall or SourceTargetMismatch.
StandardRegularMap direct_sum(const StandardRegularMap& phi, const StandardRegularMap& psi,
                              AlgebraPtr ambient);

/// Equality of the induced maps on every matrix unit (phases compared to
/// within 1e-12).
bool same_map(const StandardRegularMap& a, const StandardRegularMap& b);

/// Ad(v) ∘ phi for a standard unitary v of the target.
StandardRegularMap conjugate(const StandardPartialIsometry& v, const StandardRegularMap& phi);

/// phi(v) + (1 - phi(1)) for a standard unitary v of the source.
StandardPartialIsometry image_of_unitary(const StandardRegularMap& phi,
                                         const StandardPartialIsometry& v);

/// Largest singular value.
double operator_norm(const Matrix& m);

/// Numeric images of the matrix units e_ij, (i,j) an edge of the source.
class NumericStarMap {
 public:
  using ImageMap = std::map<std::pair<int, int>, Matrix>;

  /// No validation; use validate_numeric for untrusted data.
  NumericStarMap(AlgebraPtr source, AlgebraPtr target, ImageMap images,
                 double tolerance = kDefaultTolerance);

  const AlgebraPtr& source() const noexcept { return source_; }
  const AlgebraPtr& target() const noexcept { return target_; }
  const ImageMap& images() const noexcept { return images_; }
  double tolerance() const noexcept { return tolerance_; }
  int target_size() const noexcept { return target_->size(); }

  const Matrix& image(int i, int j) const;
  /// Image of e_ij for (i,j) or (j,i) an edge (adjoint in the latter case).
  Matrix envelope_image(int i, int j) const;
  /// Linear extension to a matrix supported on source edges.
  Matrix apply(const Matrix& a) const;
  /// φ(1).
  Matrix unit_image() const;

 private:
  AlgebraPtr source_;
  AlgebraPtr target_;
  ImageMap images_;
  double tolerance_;
};

NumericStarMap to_numeric(const StandardRegularMap& phi,
                          std::optional<std::span<const Complex>> phases = std::nullopt);

/// Checks range containment, star consistency and multiplicativity on the
/// C*-envelope within tol in operator norm. Throws NotInRange(i,j),
/// NotStarConsistent(i,j) or NotMultiplicative(i,j,k,l) with the residual.
NumericStarMap validate_numeric(NumericStarMap::ImageMap images, AlgebraPtr source,
                                AlgebraPtr target, double tol = kDefaultTolerance);

/// Ad(u) ∘ phi.
NumericStarMap conjugate(const Matrix& u, const NumericStarMap& phi);
NumericStarMap compose(const NumericStarMap& outer, const NumericStarMap& inner);
NumericStarMap compose(const NumericStarMap& outer, const StandardRegularMap& inner);
/// u (as an element of the source) ↦ phi(u) + (1 - phi(1)).
Matrix image_of_unitary(const NumericStarMap& phi, const Matrix& u);

/// max over source matrix units of ‖a(e_ij) - b(e_ij)‖.
double map_distance(const NumericStarMap& a, const NumericStarMap& b);

}  // namespace limitalg
