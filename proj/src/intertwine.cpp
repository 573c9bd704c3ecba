#include "limitalg/intertwine.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace limitalg {

namespace {

Unitary identity_unitary(int n) { return StandardPartialIsometry::identity(n); }

Unitary image_of(const CrossoverMap& phi, const Unitary& u) {
  const auto* s = std::get_if<StandardRegularMap>(&phi);
  const auto* v = std::get_if<StandardPartialIsometry>(&u);
  if (s && v) return image_of_unitary(*s, *v);
  return image_of_unitary(as_numeric(phi), to_dense(u));
}

CrossoverMap conjugate_by(const Unitary& u, const CrossoverMap& phi) {
  const auto* s = std::get_if<StandardRegularMap>(&phi);
  const auto* v = std::get_if<StandardPartialIsometry>(&u);
  if (s && v) return conjugate(*v, *s);
  return conjugate(to_dense(u), as_numeric(phi));
}

CrossoverMap compose_cross(const CrossoverMap& outer, const CrossoverMap& inner) {
  const auto* so = std::get_if<StandardRegularMap>(&outer);
  const auto* si = std::get_if<StandardRegularMap>(&inner);
  if (so && si) return compose(*so, *si);
  if (si) return compose(std::get<NumericStarMap>(outer), *si);
  return compose(as_numeric(outer), std::get<NumericStarMap>(inner));
}

double distance_to(const CrossoverMap& m, const StandardRegularMap& s) {
  if (const auto* sm = std::get_if<StandardRegularMap>(&m)) return standard_distance(*sm, s);
  return map_distance(std::get<NumericStarMap>(m), to_numeric(s));
}

int order_of_alpha(std::size_t k) { return static_cast<int>(2 * k + 1); }
int order_of_beta(std::size_t k) { return static_cast<int>(2 * k + 2); }

[[noreturn]] void rethrow_at(const Error& e, int idx) {
  throw Error(e.code(), "crossover " + std::to_string(idx) + ": " + e.what(), {idx},
              e.residual());
}

struct Standardized {
  Unitary unitary;
  StandardRegularMap map;
};

Standardized standardize_first(const CrossoverMap& alpha) {
  if (const auto* s = std::get_if<StandardRegularMap>(&alpha))
    return {identity_unitary(s->target()->size()), *s};
  RegularityVerdict v = is_regular(std::get<NumericStarMap>(alpha));
  if (!v.regular) throw Error(ErrorCode::NotRegular, "crossover 1: " + v.reason, {1}, v.residual);
  return {v.unitary, *v.standard};
}

// Replaces an approximately commuting triangle by an exact one: returns
// Ad(W) ∘ outer together with W.
std::pair<CrossoverMap, Unitary> close_triangle(const StandardRegularMap& theta,
                                                const StandardRegularMap& inner,
                                                const CrossoverMap& outer, double tol, int idx) {
  const CrossoverMap comp = compose_cross(outer, inner);
  const double r = distance_to(comp, theta);
  const int n = target_of(outer)->size();
  if (r <= tol) return {outer, identity_unitary(n)};
  const double c = threshold(*inner.source());
  if (r >= c)
    throw Error(ErrorCode::ResidualTooLarge,
                "crossover " + std::to_string(idx) + ": triangle residual " + std::to_string(r) +
                    " is not below " + std::to_string(c),
                {idx}, r);
  Matrix w;
  try {
    w = close_conjugacy(as_numeric(comp), to_numeric(theta));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotRegular) rethrow_at(e, idx);
    throw Error(ErrorCode::ResidualTooLarge, "crossover " + std::to_string(idx) + ": " + e.what(),
                {idx}, r);
  }
  return {conjugate_by(w, outer), w};
}

CorrectedDiagram run(const CrossoverDiagram& d, bool approximate) {
  check_diagram(d);
  CorrectedDiagram out;
  const double tol = d.tolerance;
  {
    Standardized s = standardize_first(d.alphas.front());
    out.v_hat.push_back(std::move(s.unitary));
    out.alphas.push_back(std::move(s.map));
  }
  auto step = [&](const StandardRegularMap& theta, const StandardRegularMap& inner,
                  const CrossoverMap& raw, const Unitary& previous, int idx) {
    Unitary pre = image_of(raw, adjoint(previous));
    CrossoverMap twisted = conjugate_by(pre, raw);
    Unitary w = identity_unitary(target_of(raw)->size());
    if (approximate) std::tie(twisted, w) = close_triangle(theta, inner, twisted, tol, idx);
    try {
      Restandardized r = restandardize_triangle(theta, inner, twisted, tol);
      return Standardized{multiply(r.unitary, multiply(w, pre)), std::move(r.standard)};
    } catch (const Error& e) {
      if (e.code() == ErrorCode::TriangleNotCommuting || e.code() == ErrorCode::NotRegular ||
          e.code() == ErrorCode::NotInnerEquivalent)
        rethrow_at(e, idx);
      throw;
    }
  };
  for (std::size_t k = 0; k < d.betas.size(); ++k) {
    Standardized b = step(composite(d.top, d.n[k], d.n[k + 1]), out.alphas[k], d.betas[k],
                          out.v_hat[k], order_of_beta(k));
    out.u_hat.push_back(std::move(b.unitary));
    out.betas.push_back(std::move(b.map));
    if (k + 1 < d.alphas.size()) {
      Standardized a = step(composite(d.bottom, d.m[k], d.m[k + 1]), out.betas[k],
                            d.alphas[k + 1], out.u_hat[k], order_of_alpha(k + 1));
      out.v_hat.push_back(std::move(a.unitary));
      out.alphas.push_back(std::move(a.map));
    }
  }
  out.report = verify_diagram(corrected_diagram(d, out));
  return out;
}

CrossoverReport inspect(const CrossoverMap& phi, bool alpha, int index, double tol) {
  CrossoverReport rep{alpha, index, true, true, std::nullopt};
  const auto* num = std::get_if<NumericStarMap>(&phi);
  if (!num) return rep;
  for (const auto& [key, m] : num->images()) {
    const auto [i, j] = key;
    bool diag_fail = false, norm_fail = false;
    if (i == j) {
      Matrix off = m;
      off.diagonal().setZero();
      diag_fail = off.cwiseAbs().maxCoeff() > tol;
    }
    Eigen::MatrixXi nz = (m.cwiseAbs().array() > tol).cast<int>().matrix();
    if (m.size() > 0)
      norm_fail = nz.rowwise().sum().maxCoeff() > 1 || nz.colwise().sum().maxCoeff() > 1;
    if (diag_fail) rep.maps_diagonal = false;
    if (norm_fail) rep.normalizing = false;
    if ((diag_fail || norm_fail) && !rep.witness) rep.witness = Edge{i, j};
  }
  return rep;
}

}  // namespace

void check_diagram(const CrossoverDiagram& d) {
  check_system(d.top);
  check_system(d.bottom);
  const std::size_t ka = d.alphas.size(), kb = d.betas.size();
  if (ka == 0 || (ka != kb && ka != kb + 1))
    throw Error(ErrorCode::ShapeMismatch, "need as many alphas as betas, or one more");
  if (d.n.size() != std::max(ka, kb + 1) || d.m.size() != ka)
    throw Error(ErrorCode::ShapeMismatch, "stage index lists do not match the crossovers");
  for (std::size_t k = 0; k + 1 < d.n.size(); ++k)
    if (d.n[k] > d.n[k + 1]) throw Error(ErrorCode::ShapeMismatch, "top stage indices decrease");
  for (std::size_t k = 0; k + 1 < d.m.size(); ++k)
    if (d.m[k] > d.m[k + 1])
      throw Error(ErrorCode::ShapeMismatch, "bottom stage indices decrease");
  auto joins = [](const CrossoverMap& c, const AlgebraPtr& s, const AlgebraPtr& t, int idx) {
    if (!(*source_of(c) == *s) || !(*target_of(c) == *t))
      throw Error(ErrorCode::ShapeMismatch,
                  "crossover " + std::to_string(idx) + " does not join its stages", {idx});
  };
  for (std::size_t k = 0; k < ka; ++k)
    joins(d.alphas[k], stage(d.top, d.n[k]), stage(d.bottom, d.m[k]), order_of_alpha(k));
  for (std::size_t k = 0; k < kb; ++k)
    joins(d.betas[k], stage(d.bottom, d.m[k]), stage(d.top, d.n[k + 1]), order_of_beta(k));
  if (d.tolerance < 0) throw Error(ErrorCode::InvalidInput, "tolerance must be nonnegative");
}

DiagramReport verify_diagram(const CrossoverDiagram& d) {
  check_diagram(d);
  DiagramReport rep;
  std::size_t t = 0;
  auto add = [&](bool top, int k, double r) {
    TriangleReport tr{top, k, r, std::nullopt, true};
    if (t < d.budgets.size()) {
      tr.budget = d.budgets[t];
      tr.within_budget = r <= d.budgets[t];
    }
    ++t;
    rep.within_budgets = rep.within_budgets && tr.within_budget;
    rep.residual_sum += r;
    rep.max_residual = std::max(rep.max_residual, r);
    rep.triangles.push_back(tr);
  };
  for (std::size_t k = 0; k < d.betas.size(); ++k) {
    add(true, static_cast<int>(k) + 1,
        distance_to(compose_cross(d.betas[k], d.alphas[k]), composite(d.top, d.n[k], d.n[k + 1])));
    if (k + 1 < d.alphas.size())
      add(false, static_cast<int>(k) + 1,
          distance_to(compose_cross(d.alphas[k + 1], d.betas[k]),
                      composite(d.bottom, d.m[k], d.m[k + 1])));
  }
  for (std::size_t k = 0; k < d.alphas.size(); ++k)
    rep.crossovers.push_back(inspect(d.alphas[k], true, static_cast<int>(k) + 1, d.tolerance));
  for (std::size_t k = 0; k < d.betas.size(); ++k)
    rep.crossovers.push_back(inspect(d.betas[k], false, static_cast<int>(k) + 1, d.tolerance));
  return rep;
}

CorrectedDiagram exact_intertwine(const CrossoverDiagram& d) { return run(d, false); }
CorrectedDiagram approx_intertwine(const CrossoverDiagram& d) { return run(d, true); }

CorrectedDiagram intertwine(const CrossoverDiagram& d) {
  return d.mode == DiagramMode::Exact ? exact_intertwine(d) : approx_intertwine(d);
}

CrossoverDiagram corrected_diagram(const CrossoverDiagram& d, const CorrectedDiagram& c) {
  CrossoverDiagram out = d;
  out.alphas.assign(c.alphas.begin(), c.alphas.end());
  out.betas.assign(c.betas.begin(), c.betas.end());
  out.mode = DiagramMode::Exact;
  return out;
}

}  // namespace limitalg
