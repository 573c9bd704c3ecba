#include "limitalg/system.hpp"

#include <algorithm>
#include <string>

namespace limitalg {

void check_system(const DirectSystem& s) {
  if (s.stages.empty()) throw Error(ErrorCode::InvalidInput, "system has no stages");
  const std::size_t expected = s.stages.size() - (s.periodic ? 0 : 1);
  if (s.connectors.size() != expected)
    throw Error(ErrorCode::ShapeMismatch,
                "expected " + std::to_string(expected) + " connectors, got " +
                    std::to_string(s.connectors.size()));
  for (std::size_t k = 0; k < s.connectors.size(); ++k) {
    const auto& c = s.connectors[k];
    const auto& next = k + 1 < s.stages.size() ? s.stages[k + 1] : s.stages.back();
    if (!(*c.source() == *s.stages[k]) || !(*c.target() == *next))
      throw Error(ErrorCode::ShapeMismatch,
                  "connector " + std::to_string(k + 1) + " does not join its stages",
                  {static_cast<long>(k) + 1});
  }
}

StandardRegularMap identity_map(const AlgebraPtr& a) {
  std::vector<int> iota(a->size());
  for (int i = 0; i < a->size(); ++i) iota[i] = i;
  return assemble_regular(a, a, {validate_multiplicity_one(std::move(iota), a, a)});
}

const AlgebraPtr& stage(const DirectSystem& s, int k) {
  if (k < static_cast<int>(s.stages.size())) return s.stages[k];
  if (!s.periodic) throw Error(ErrorCode::DepthUnavailable, "stage beyond the system", {k + 1});
  return s.stages.back();
}

StandardRegularMap composite(const DirectSystem& s, int from, int to) {
  if (from < 0 || to < from)
    throw Error(ErrorCode::InvalidInput, "stage range is reversed", {from + 1, to + 1});
  StandardRegularMap out = identity_map(stage(s, from));
  for (int k = from; k < to; ++k) {
    const int idx = std::min(k, static_cast<int>(s.connectors.size()) - 1);
    if (k >= static_cast<int>(s.connectors.size()) && !s.periodic)
      throw Error(ErrorCode::DepthUnavailable, "stage beyond the system", {to + 1});
    out = compose(s.connectors[idx], out);
  }
  return out;
}

DirectSystem uhf_system(int p, int count, bool diagonal) {
  if (p < 1 || count < 1) throw Error(ErrorCode::InvalidInput, "need p >= 1 and count >= 1");
  DirectSystem out;
  int n = p;
  for (int k = 0; k < count; ++k, n *= p)
    out.stages.push_back(diagonal ? diagonal_algebra(n) : full_matrix_algebra(n));
  for (int k = 0; k + 1 < count; ++k) {
    const auto& a = out.stages[k];
    const auto& b = out.stages[k + 1];
    std::vector<MultiplicityOneMap> summands;
    for (int s = 0; s < p; ++s) {
      std::vector<int> iota(a->size());
      for (int i = 0; i < a->size(); ++i) iota[i] = s * a->size() + i;
      summands.push_back(validate_multiplicity_one(std::move(iota), a, b));
    }
    out.connectors.push_back(assemble_regular(a, b, std::move(summands)));
  }
  return out;
}

DirectSystem tr_refinement_system(int r, int count, int factor) {
  if (r < 1 || count < 1 || factor < 1)
    throw Error(ErrorCode::InvalidInput, "need r, count and factor at least 1");
  DirectSystem out;
  int m = 1;
  for (int k = 0; k < count; ++k, m *= factor) out.stages.push_back(tr_algebra(r, m));
  m = 1;
  for (int k = 0; k + 1 < count; ++k, m *= factor) {
    const auto& a = out.stages[k];
    const auto& b = out.stages[k + 1];
    std::vector<MultiplicityOneMap> summands;
    for (int s = 0; s < factor; ++s) {
      std::vector<int> iota(a->size());
      for (int i = 0; i < a->size(); ++i) {
        const int band = i / m, pos = i % m;
        iota[i] = band * m * factor + s * m + pos;
      }
      summands.push_back(validate_multiplicity_one(std::move(iota), a, b));
    }
    out.connectors.push_back(assemble_regular(a, b, std::move(summands)));
  }
  return out;
}

DirectSystem self_adjoint_system(const DirectSystem& s) {
  check_system(s);
  DirectSystem out;
  out.periodic = s.periodic;
  for (const auto& a : s.stages) out.stages.push_back(self_adjoint_envelope(*a));
  for (std::size_t k = 0; k < s.connectors.size(); ++k) {
    const auto& c = s.connectors[k];
    const auto& a = out.stages[k];
    const auto& b = k + 1 < out.stages.size() ? out.stages[k + 1] : out.stages.back();
    std::vector<MultiplicityOneMap> summands;
    for (const auto& m : c.summands()) summands.push_back(validate_multiplicity_one(m.iota(), a, b));
    out.connectors.push_back(assemble_regular(a, b, std::move(summands), c.phases()));
  }
  return out;
}

}  // namespace limitalg
