#pragma once

// Numeric detection of multiplicity-one summands through test products, the
// regularity decision for numeric maps, and conjugacy of close regular maps.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "limitalg/homs.hpp"

namespace limitalg {

/// A matrix unit e_{row,col} of A + A*; starred when (row,col) is not an
/// edge of A, so the token is the adjoint of e_{col,row}.
struct Token {
  int row;
  int col;
  bool starred;
  friend bool operator==(const Token&, const Token&) = default;
};

struct TestWord {
  std::vector<Token> tokens;
  int product_projection;  // the product is e_{p,p}
  int length() const { return static_cast<int>(tokens.size()); }
};

/// Closed depth-first walk over a spanning tree of class `component`, from
/// its least index with neighbours in ascending order.
TestWord test_word(const DigraphAlgebra& a, int component);

/// 1/(n+1) for the test word of the class.
double class_threshold(const DigraphAlgebra& a, int component);
/// Minimum of class_threshold over all classes.
double threshold(const DigraphAlgebra& a);

struct TestProductResult {
  double norm;
  bool present;  // norm >= 1/2
};

/// φ(v1)P_{π(v1*v1)} ··· φ(vn)P_{π(vn*vn)} with P the target block projections.
/// With several classes in the domain of alpha, the smallest norm is reported.
TestProductResult test_product(const NumericStarMap& phi, const MultiplicityOneMap& alpha);

struct SummandCensus {
  /// Multiplicity per index map; each index map is defined on exactly one class.
  std::map<IndexMap, int> classes;
  int residual_rank = 0;
  friend bool operator==(const SummandCensus&, const SummandCensus&) = default;
};

inline constexpr long kCensusCapacity = 1000000;

/// Throws InconsistentRanks(r, j) when detected multiplicities exceed the
/// observed rank of P_r φ(e_jj) P_r, CapacityExceeded beyond kCensusCapacity
/// candidates.
SummandCensus summand_census(const NumericStarMap& phi);

/// The standard regular map with the given census: copies are laid out class
/// by class on the lowest free indices of each target block.
StandardRegularMap census_standard_form(const SummandCensus& census, AlgebraPtr source,
                                        AlgebraPtr target);

struct RegularityVerdict {
  bool regular = false;
  SummandCensus census;
  std::optional<StandardRegularMap> standard;
  /// Ad(unitary) ∘ φ = standard when regular.
  Matrix unitary;
  double residual = 0.0;
  double threshold = 0.0;
  std::string reason;  // empty when regular
};

RegularityVerdict is_regular(const NumericStarMap& phi);

/// U with Ad(U) ∘ phi1 = phi2. Throws TooFarApart when the distance is not
/// below the threshold of the source, CensusMismatch, NotRegular or
/// ResidualTooLarge.
Matrix close_conjugacy(const NumericStarMap& phi1, const NumericStarMap& phi2);

}  // namespace limitalg
