#pragma once

// Correction of a crossover diagram between two direct systems into an
// exactly commuting diagram of standard regular maps.
//
//   A_{n_1} ---> A_{n_2} ---> A_{n_3} ...
//        \      ^     \      ^
//      α_1\    /β_1  α_2\   /β_2
//          v  /          v /
//   B_{m_1} ---> B_{m_2} ...

#include <optional>
#include <string>
#include <vector>

#include "limitalg/conjugacy.hpp"
#include "limitalg/system.hpp"

namespace limitalg {

enum class DiagramMode { Exact, Approximate };

struct CrossoverDiagram {
  DirectSystem top;
  DirectSystem bottom;
  std::vector<int> n;  // 0-based stage indices into top
  std::vector<int> m;  // 0-based stage indices into bottom
  std::vector<CrossoverMap> alphas;  // A_{n_k} → B_{m_k}
  std::vector<CrossoverMap> betas;   // B_{m_k} → A_{n_{k+1}}
  DiagramMode mode = DiagramMode::Exact;
  /// Per triangle, in the order top_1, bottom_1, top_2, ...; may be empty.
  std::vector<double> budgets;
  double tolerance = kDefaultTolerance;
};

/// Throws ShapeMismatch when a crossover does not join the stages it claims.
void check_diagram(const CrossoverDiagram& d);

struct TriangleReport {
  bool top;   // β_k∘α_k against the top connector, else α_{k+1}∘β_k
  int index;  // k, 1-based
  double residual;
  std::optional<double> budget;
  bool within_budget;
};

struct CrossoverReport {
  bool alpha;
  int index;  // 1-based
  bool maps_diagonal;  // every φ(e_ii) is diagonal
  bool normalizing;    // every φ(e_ij) has at most one nonzero per row and column
  std::optional<Edge> witness;  // first failing matrix unit, 0-based
};

struct DiagramReport {
  std::vector<TriangleReport> triangles;
  std::vector<CrossoverReport> crossovers;
  double residual_sum = 0.0;
  double max_residual = 0.0;
  bool within_budgets = true;
};

DiagramReport verify_diagram(const CrossoverDiagram& d);

struct CorrectedDiagram {
  std::vector<StandardRegularMap> alphas;
  std::vector<StandardRegularMap> betas;
  /// α̂_k = Ad(V̂_k) ∘ α_k and β̂_k = Ad(Û_k) ∘ β_k.
  std::vector<Unitary> v_hat;
  std::vector<Unitary> u_hat;
  DiagramReport report;  // verification of the corrected diagram
};

/// Throws TriangleNotCommuting(k) or NotRegular(k) where k counts crossovers
/// in the order α_1, β_1, α_2, ...
CorrectedDiagram exact_intertwine(const CrossoverDiagram& d);
/// Throws ResidualTooLarge(k) when a triangle is not within the threshold
/// of its source algebra, NotRegular(k).
CorrectedDiagram approx_intertwine(const CrossoverDiagram& d);
CorrectedDiagram intertwine(const CrossoverDiagram& d);

/// The diagram with its crossovers replaced by the corrected ones.
CrossoverDiagram corrected_diagram(const CrossoverDiagram& d, const CorrectedDiagram& c);

}  // namespace limitalg
