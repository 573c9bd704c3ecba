#pragma once

// Finite-dimensional digraph algebras A(G) with their diagonal masas.
//
// Indices are 0-based in the C++ interface. JSON documents, reports and error
// witnesses use 1-based indices.

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "limitalg/error.hpp"

namespace limitalg {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RankMatrix = Eigen::MatrixXi;

struct Edge {
  int from;
  int to;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// A relation on {0..n-1}, stored densely.
class Digraph {
 public:
  Digraph() = default;
  explicit Digraph(int n) : n_(n), adj_(static_cast<std::size_t>(n) * n, 0) {}

  int size() const noexcept { return n_; }
  bool has_edge(int i, int j) const noexcept { return adj_[index(i, j)] != 0; }
  void add_edge(int i, int j) { adj_[index(i, j)] = 1; }

  /// Edges in lexicographic order.
  std::vector<Edge> edges() const;

  bool is_reflexive() const;
  bool is_transitive() const;

  friend bool operator==(const Digraph&, const Digraph&) = default;

 private:
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * n_ + j;
  }

  int n_ = 0;
  std::vector<std::uint8_t> adj_;
};

/// A(G) for a reflexive transitive G, with the block structure of A ∩ A*
/// (blocks), the simple summands of C*(A) (classes) and the reduced digraph
/// on blocks. Blocks and classes are ordered by least element.
class DigraphAlgebra {
 public:
  explicit DigraphAlgebra(Digraph graph);

  int size() const noexcept { return graph_.size(); }
  const Digraph& graph() const noexcept { return graph_; }
  bool has_edge(int i, int j) const noexcept { return graph_.has_edge(i, j); }
  std::vector<Edge> edges() const { return graph_.edges(); }

  const std::vector<std::vector<int>>& blocks() const noexcept { return blocks_; }
  int block_of(int i) const { return block_of_[i]; }
  const std::vector<std::vector<int>>& classes() const noexcept { return classes_; }
  int class_of(int i) const { return class_of_[i]; }
  int class_of_block(int b) const { return class_of_[blocks_[b].front()]; }
  /// Blocks contained in class c, ascending.
  std::vector<int> blocks_of_class(int c) const;

  const Digraph& reduced() const noexcept { return reduced_; }

  friend bool operator==(const DigraphAlgebra& a, const DigraphAlgebra& b) {
    return a.graph_ == b.graph_;
  }

 private:
  Digraph graph_;
  std::vector<std::vector<int>> blocks_;
  std::vector<int> block_of_;
  std::vector<std::vector<int>> classes_;
  std::vector<int> class_of_;
  Digraph reduced_;
};

using AlgebraPtr = std::shared_ptr<const DigraphAlgebra>;

/// Validates reflexivity and transitivity; throws NotReflexive(i) or
/// NotTransitive(i,j,k) with the first violation in lexicographic order.
AlgebraPtr build_digraph_algebra(int n, std::span<const Edge> edges);

// Frequently used algebras.
AlgebraPtr full_matrix_algebra(int n);
AlgebraPtr diagonal_algebra(int n);
/// Block upper triangular algebra with the given band sizes (T_r when all
/// sizes are 1, T_r ⊗ M_m when all sizes equal m).
AlgebraPtr nest_algebra(std::span<const int> band_sizes);
AlgebraPtr tr_algebra(int r, int multiplicity = 1);
/// Direct sum, with the index ranges of the summands placed consecutively.
AlgebraPtr direct_sum(std::span<const AlgebraPtr> summands);
/// C*(A): every class becomes a full matrix block.
AlgebraPtr self_adjoint_envelope(const DigraphAlgebra& a);

/// True when the Hasse diagram of the reduced digraph has an undirected cycle
/// (the 4-cycle digraph does, T_r does not).
bool reduced_has_cycle(const DigraphAlgebra& a);

struct StandardProjection {
  std::vector<int> support;  // sorted, distinct
};

/// rank(E_r P_j E_r) for block r and projection j. Throws NotOrthogonal when
/// two supports meet.
RankMatrix rank_profile(std::span<const StandardProjection> projections,
                        const DigraphAlgebra& a);

/// v = Σ_i phase_i e_{target(i), i} over the domain of a partial injection.
class StandardPartialIsometry {
 public:
  StandardPartialIsometry() = default;
  /// target[i] < 0 means i is outside the domain. Empty phases mean all +1.
  StandardPartialIsometry(int n, std::vector<int> target,
                          std::vector<Complex> phases = {});

  static StandardPartialIsometry identity(int n);

  int size() const noexcept { return static_cast<int>(target_.size()); }
  const std::vector<int>& targets() const noexcept { return target_; }
  int target(int i) const { return target_[i]; }
  Complex phase(int i) const { return phases_[i]; }
  const std::vector<Complex>& phases() const noexcept { return phases_; }

  bool is_unitary() const;
  bool is_identity() const;
  StandardPartialIsometry adjoint() const;
  /// (*this) * rhs as operators.
  StandardPartialIsometry operator*(const StandardPartialIsometry& rhs) const;
  Matrix to_dense() const;

  friend bool operator==(const StandardPartialIsometry&,
                         const StandardPartialIsometry&) = default;

 private:
  std::vector<int> target_;
  std::vector<Complex> phases_;
};

/// Membership in the partial isometry normaliser N_C(A): every pair i ↦ j
/// must have (j,i) an edge of A.
bool is_normalizing(const StandardPartialIsometry& v, const DigraphAlgebra& a);

/// U = Σ e_{perm(i), i} with perm preserving every block, so U ∈ A ∩ A*.
class PermutationUnitary {
 public:
  PermutationUnitary(const DigraphAlgebra& a, std::vector<int> perm);

  const std::vector<int>& perm() const noexcept { return perm_; }
  int operator()(int i) const { return perm_[i]; }
  StandardPartialIsometry as_partial_isometry() const;
  Matrix to_dense() const { return as_partial_isometry().to_dense(); }

 private:
  std::vector<int> perm_;
};

}  // namespace limitalg
