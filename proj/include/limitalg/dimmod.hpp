#pragma once

// Dimension modules for systems of T_r-summand algebras: the semiring
// Z+[S_r] of monotone self-maps of {1..r}, stage modules, induced maps,
// scales and the enveloping group.

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "limitalg/system.hpp"

namespace limitalg {

/// θ: {1..r} → {1..r} nondecreasing; values are 1-based.
struct MonotoneMap {
  std::vector<int> values;

  int r() const { return static_cast<int>(values.size()); }
  int operator()(int i) const { return values[i - 1]; }
  friend auto operator<=>(const MonotoneMap&, const MonotoneMap&) = default;
};

MonotoneMap identity_monotone(int r);
/// Throws InvalidInput unless values are nondecreasing and within 1..r.
MonotoneMap make_monotone(std::vector<int> values);
/// θ ∘ σ. Throws BandMismatch when r differs.
MonotoneMap compose(const MonotoneMap& theta, const MonotoneMap& sigma);

inline constexpr int kMaxMonotoneBands = 8;

/// Lexicographic. Throws CapacityExceeded for r > kMaxMonotoneBands.
std::vector<MonotoneMap> enumerate_monotone(int r);

class SemiringElement {
 public:
  using Terms = std::map<MonotoneMap, std::uint64_t>;

  explicit SemiringElement(int r) : r_(r) {}
  SemiringElement(int r, Terms terms);
  static SemiringElement zero(int r) { return SemiringElement(r); }
  static SemiringElement unit(int r) { return of(identity_monotone(r)); }
  static SemiringElement of(const MonotoneMap& theta, std::uint64_t coeff = 1);

  int r() const noexcept { return r_; }
  const Terms& terms() const noexcept { return terms_; }
  std::uint64_t coeff(const MonotoneMap& theta) const;
  bool is_zero() const noexcept { return terms_.empty(); }

  friend bool operator==(const SemiringElement&, const SemiringElement&) = default;

 private:
  int r_;
  Terms terms_;  // no zero coefficients
};

/// Throw BandMismatch when r differs.
SemiringElement semiring_add(const SemiringElement& a, const SemiringElement& b);
SemiringElement semiring_mul(const SemiringElement& a, const SemiringElement& b);
inline SemiringElement operator+(const SemiringElement& a, const SemiringElement& b) {
  return semiring_add(a, b);
}
inline SemiringElement operator*(const SemiringElement& a, const SemiringElement& b) {
  return semiring_mul(a, b);
}

/// One semiring element per summand of a stage.
using StageModule = std::vector<SemiringElement>;

StageModule zero_module(int r, int summands);

/// Entry (c, b) is the class of the partial embedding of source summand b
/// into target summand c.
struct ModuleMapMatrix {
  int r = 1;
  int rows = 0;
  int cols = 0;
  std::vector<SemiringElement> entries;  // row-major

  const SemiringElement& at(int c, int b) const { return entries[c * cols + b]; }
  SemiringElement& at(int c, int b) { return entries[c * cols + b]; }
  friend bool operator==(const ModuleMapMatrix&, const ModuleMapMatrix&) = default;
};

ModuleMapMatrix zero_matrix(int r, int rows, int cols);
/// a · b with semiring arithmetic. Throws DimensionMismatch or BandMismatch.
ModuleMapMatrix multiply(const ModuleMapMatrix& a, const ModuleMapMatrix& b);

/// Direct sum of T_r ⊗ M_{n_b}; summand b occupies a consecutive range with
/// band t at offset t·n_b inside it.
struct TrShape {
  int r = 1;
  std::vector<int> multiplicities;
  friend bool operator==(const TrShape&, const TrShape&) = default;
};

AlgebraPtr tr_stage(const TrShape& shape);
/// Throws NotTrBand unless the algebra is tr_stage(shape).
void check_tr_stage(const DigraphAlgebra& a, const TrShape& shape);

/// Throws NotTrBand when source or target is not of the declared shape.
ModuleMapMatrix class_of_map(const StandardRegularMap& phi, const TrShape& source,
                             const TrShape& target);

/// (M x)_c = Σ_b M(c, b) · x_b. Throws DimensionMismatch or BandMismatch.
StageModule induced_map(const ModuleMapMatrix& m, const StageModule& x);
/// Componentwise x_b · s.
StageModule right_act(const StageModule& x, const SemiringElement& s);

/// Full column rank over the basis S_r × summands of the Z+-linear map.
bool is_injective(const ModuleMapMatrix& m);

struct ColimitElement {
  int stage;  // 0-based birth stage
  StageModule value;
};

enum class Comparison { Equal, NotYetDistinguishable, Distinct };

/// A T_r-shaped system with its connector classes precomputed.
class LimitPresentation {
 public:
  LimitPresentation(DirectSystem system, std::vector<TrShape> shapes);

  int r() const noexcept { return shapes_.front().r; }
  const DirectSystem& system() const noexcept { return system_; }
  const TrShape& shape(int k) const;
  /// Class matrix of connector k (stage k → k+1).
  const ModuleMapMatrix& connector_class(int k) const;
  /// Throws DepthUnavailable past the presented stages.
  StageModule push(const ColimitElement& e, int to) const;
  /// Every connector from stage m on is injective.
  bool injective_from(int m) const;

 private:
  DirectSystem system_;
  std::vector<TrShape> shapes_;
  std::vector<ModuleMapMatrix> classes_;
  std::vector<char> injective_;
};

Comparison equal_up_to_stage(const LimitPresentation& p, const ColimitElement& a,
                             const ColimitElement& b, int m);

/// For every summand b and band t: Σ_θ x_b(θ)·|θ⁻¹(t)| ≤ capacities[b].
bool in_scale(const StageModule& x, std::span<const int> capacities);

/// plus − minus, kept with common terms cancelled.
struct GroupElement {
  StageModule plus;
  StageModule minus;
  friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

/// Throws ShapeMismatch when the modules differ in length or r.
GroupElement enveloping_group_stage(const StageModule& minus, const StageModule& plus);
/// a.plus + b.minus == b.plus + a.minus.
bool same_difference(const GroupElement& a, const GroupElement& b);

}  // namespace limitalg
