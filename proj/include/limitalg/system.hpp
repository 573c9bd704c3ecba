#pragma once

#include <vector>

#include "limitalg/homs.hpp"

namespace limitalg {

/// A_1 → A_2 → ... with standard regular connectors. When periodic, the last
/// connector (an endomorphism of the last stage) repeats forever.
struct DirectSystem {
  std::vector<AlgebraPtr> stages;
  std::vector<StandardRegularMap> connectors;
  bool periodic = false;
};

/// Throws ShapeMismatch when connectors do not chain the stages (witness:
/// 1-based connector index), InvalidInput for a periodic system whose last
/// connector is not an endomorphism.
void check_system(const DirectSystem& s);

/// e_ij ↦ e_ij.
StandardRegularMap identity_map(const AlgebraPtr& a);

/// Composite connector from stage `from` to stage `to` (0-based, from <= to).
/// Periodic systems may be read past their last stage.
StandardRegularMap composite(const DirectSystem& s, int from, int to);

/// Stage k of the system, following the periodic tail if needed.
const AlgebraPtr& stage(const DirectSystem& s, int k);

/// p^∞: stages of size p, p^2, ..., full matrix algebras (or their diagonals),
/// each unit e_ij ↦ Σ_s e_{s·n+i, s·n+j}.
DirectSystem uhf_system(int p, int count, bool diagonal = false);

/// Stages T_r ⊗ M_{f^k} for k = 0..count-1 with e_ij ↦ e_ij ⊗ 1_f.
DirectSystem tr_refinement_system(int r, int count, int factor = 2);

/// Same index data with every stage replaced by its self-adjoint envelope.
DirectSystem self_adjoint_system(const DirectSystem& s);

}  // namespace limitalg
