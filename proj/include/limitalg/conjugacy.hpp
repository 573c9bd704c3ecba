#pragma once

// Conjugacy witnesses between standard regular maps: permutation transport of
// diagonal projections, standard unitary equivalence and restandardization of
// a commuting triangle.

#include <utility>
#include <variant>
#include <vector>

#include "limitalg/detect.hpp"
#include "limitalg/homs.hpp"

namespace limitalg {

/// A crossover map is kept combinatorial when possible.
using CrossoverMap = std::variant<StandardRegularMap, NumericStarMap>;
using Unitary = std::variant<StandardPartialIsometry, Matrix>;

const AlgebraPtr& source_of(const CrossoverMap& m);
const AlgebraPtr& target_of(const CrossoverMap& m);
NumericStarMap as_numeric(const CrossoverMap& m);
Matrix to_dense(const Unitary& u);
Unitary adjoint(const Unitary& u);
/// Standard × standard stays standard.
Unitary multiply(const Unitary& a, const Unitary& b);
bool is_identity(const Unitary& u, double tol = 1e-12);

/// U = Σ e_{perm(i), i} with U* P_j U = Q_j. Throws ProfileMismatch(r, j) at
/// the first disagreement of the rank profiles.
PermutationUnitary permutation_intertwiner(std::span<const StandardProjection> p,
                                           std::span<const StandardProjection> q,
                                           const DigraphAlgebra& a);

struct ClassKey {
  std::vector<IndexMap> multiset;
  RankMatrix profile;
  friend bool operator==(const ClassKey& x, const ClassKey& y) {
    return x.multiset == y.multiset && x.profile.rows() == y.profile.rows() &&
           x.profile.cols() == y.profile.cols() && x.profile == y.profile;
  }
};

ClassKey conjugacy_class(const StandardRegularMap& phi);

/// Standard unitary V of the target with Ad(V) ∘ phi1 = phi2 exactly.
/// Throws NotInnerEquivalent when the class keys differ.
StandardPartialIsometry standard_witness(const StandardRegularMap& phi1,
                                         const StandardRegularMap& phi2);

/// Operator-norm distance of two standard maps, computed on the touched indices.
double standard_distance(const StandardRegularMap& a, const StandardRegularMap& b);

struct Restandardized {
  Unitary unitary;  // U over A3
  StandardRegularMap standard;  // Ad(U) ∘ phi2
};

/// theta = phi2 ∘ phi1 with theta, phi1 standard. Returns U with Ad(U) ∘ phi2
/// standard and Ad(U) ∘ phi2 ∘ phi1 = theta. Throws TriangleNotCommuting or
/// NotRegular.
Restandardized restandardize_triangle(const StandardRegularMap& theta,
                                      const StandardRegularMap& phi1, const CrossoverMap& phi2,
                                      double tol = kDefaultTolerance);

}  // namespace limitalg
