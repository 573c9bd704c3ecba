#include "limitalg/dimmod.hpp"

#include <algorithm>
#include <string>

namespace limitalg {

namespace {

void same_r(int a, int b) {
  if (a != b)
    throw Error(ErrorCode::BandMismatch,
                "band counts " + std::to_string(a) + " and " + std::to_string(b) + " differ",
                {a, b});
}

std::vector<int> offsets(const TrShape& s) {
  std::vector<int> out{0};
  for (int n : s.multiplicities) out.push_back(out.back() + s.r * n);
  return out;
}

// Summand containing index i.
int summand_of(const std::vector<int>& off, int i) {
  return static_cast<int>(std::upper_bound(off.begin(), off.end(), i) - off.begin()) - 1;
}

}  // namespace

MonotoneMap identity_monotone(int r) {
  MonotoneMap m;
  for (int i = 1; i <= r; ++i) m.values.push_back(i);
  return m;
}

MonotoneMap make_monotone(std::vector<int> values) {
  const int r = static_cast<int>(values.size());
  if (r == 0) throw Error(ErrorCode::InvalidInput, "monotone map needs at least one band");
  for (int i = 0; i < r; ++i) {
    if (values[i] < 1 || values[i] > r)
      throw Error(ErrorCode::InvalidInput, "value outside 1.." + std::to_string(r), {i + 1});
    if (i > 0 && values[i] < values[i - 1])
      throw Error(ErrorCode::InvalidInput, "values decrease at " + std::to_string(i + 1), {i + 1});
  }
  return MonotoneMap{std::move(values)};
}

MonotoneMap compose(const MonotoneMap& theta, const MonotoneMap& sigma) {
  same_r(theta.r(), sigma.r());
  MonotoneMap out;
  for (int v : sigma.values) out.values.push_back(theta(v));
  return out;
}

std::vector<MonotoneMap> enumerate_monotone(int r) {
  if (r < 1) throw Error(ErrorCode::InvalidInput, "r must be at least 1");
  if (r > kMaxMonotoneBands)
    throw Error(ErrorCode::CapacityExceeded,
                "r = " + std::to_string(r) + " exceeds " + std::to_string(kMaxMonotoneBands),
                {r});
  std::vector<MonotoneMap> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int lo) -> void {
    if (static_cast<int>(cur.size()) == r) {
      out.push_back({cur});
      return;
    }
    for (int v = lo; v <= r; ++v) {
      cur.push_back(v);
      self(self, v);
      cur.pop_back();
    }
  };
  rec(rec, 1);
  return out;
}

SemiringElement::SemiringElement(int r, Terms terms) : r_(r) {
  for (auto& [theta, c] : terms) {
    same_r(theta.r(), r);
    if (c != 0) terms_.emplace(theta, c);
  }
}

SemiringElement SemiringElement::of(const MonotoneMap& theta, std::uint64_t coeff) {
  return SemiringElement(theta.r(), Terms{{theta, coeff}});
}

std::uint64_t SemiringElement::coeff(const MonotoneMap& theta) const {
  auto it = terms_.find(theta);
  return it == terms_.end() ? 0 : it->second;
}

SemiringElement semiring_add(const SemiringElement& a, const SemiringElement& b) {
  same_r(a.r(), b.r());
  SemiringElement::Terms t = a.terms();
  for (const auto& [theta, c] : b.terms()) t[theta] += c;
  return SemiringElement(a.r(), std::move(t));
}

SemiringElement semiring_mul(const SemiringElement& a, const SemiringElement& b) {
  same_r(a.r(), b.r());
  SemiringElement::Terms t;
  for (const auto& [theta, c] : a.terms())
    for (const auto& [sigma, d] : b.terms()) t[compose(theta, sigma)] += c * d;
  return SemiringElement(a.r(), std::move(t));
}

StageModule zero_module(int r, int summands) {
  return StageModule(summands, SemiringElement::zero(r));
}

ModuleMapMatrix zero_matrix(int r, int rows, int cols) {
  return {r, rows, cols, std::vector<SemiringElement>(rows * cols, SemiringElement::zero(r))};
}

ModuleMapMatrix multiply(const ModuleMapMatrix& a, const ModuleMapMatrix& b) {
  same_r(a.r, b.r);
  if (a.cols != b.rows)
    throw Error(ErrorCode::DimensionMismatch, "inner dimensions differ", {a.cols, b.rows});
  ModuleMapMatrix out = zero_matrix(a.r, a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < b.cols; ++j)
      for (int k = 0; k < a.cols; ++k) out.at(i, j) = out.at(i, j) + a.at(i, k) * b.at(k, j);
  return out;
}

AlgebraPtr tr_stage(const TrShape& shape) {
  if (shape.r < 1 || shape.multiplicities.empty())
    throw Error(ErrorCode::InvalidInput, "shape needs r >= 1 and at least one summand");
  std::vector<AlgebraPtr> parts;
  for (int n : shape.multiplicities) {
    if (n < 1) throw Error(ErrorCode::InvalidInput, "summand multiplicity must be positive");
    parts.push_back(tr_algebra(shape.r, n));
  }
  return direct_sum(parts);
}

void check_tr_stage(const DigraphAlgebra& a, const TrShape& shape) {
  if (!(a == *tr_stage(shape)))
    throw Error(ErrorCode::NotTrBand, "stage is not the declared sum of T_" +
                                          std::to_string(shape.r) + " summands");
}

ModuleMapMatrix class_of_map(const StandardRegularMap& phi, const TrShape& source,
                             const TrShape& target) {
  same_r(source.r, target.r);
  check_tr_stage(*phi.source(), source);
  check_tr_stage(*phi.target(), target);
  const int r = source.r;
  const auto so = offsets(source);
  const auto to = offsets(target);
  ModuleMapMatrix out = zero_matrix(r, static_cast<int>(target.multiplicities.size()),
                                    static_cast<int>(source.multiplicities.size()));
  for (const auto& m : decompose_maximal(phi)) {
    const int first = phi.source()->classes()[m.domain_classes().front()].front();
    const int b = summand_of(so, first);
    int c = -1;
    MonotoneMap theta;
    for (int t = 0; t < r; ++t) {
      const int img = m(so[b] + t * source.multiplicities[b]);
      c = summand_of(to, img);
      theta.values.push_back((img - to[c]) / target.multiplicities[c] + 1);
    }
    out.at(c, b) = out.at(c, b) + SemiringElement::of(make_monotone(theta.values));
  }
  return out;
}

StageModule induced_map(const ModuleMapMatrix& m, const StageModule& x) {
  if (static_cast<int>(x.size()) != m.cols)
    throw Error(ErrorCode::DimensionMismatch,
                "module has " + std::to_string(x.size()) + " entries, map expects " +
                    std::to_string(m.cols),
                {static_cast<long>(x.size()), m.cols});
  StageModule out = zero_module(m.r, m.rows);
  for (int c = 0; c < m.rows; ++c)
    for (int b = 0; b < m.cols; ++b) out[c] = out[c] + m.at(c, b) * x[b];
  return out;
}

StageModule right_act(const StageModule& x, const SemiringElement& s) {
  StageModule out;
  for (const auto& e : x) out.push_back(e * s);
  return out;
}

bool is_injective(const ModuleMapMatrix& m) {
  const auto basis = enumerate_monotone(m.r);
  const int k = static_cast<int>(basis.size());
  std::map<MonotoneMap, int> pos;
  for (int i = 0; i < k; ++i) pos[basis[i]] = i;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m.rows * k, m.cols * k);
  for (int b = 0; b < m.cols; ++b)
    for (int s = 0; s < k; ++s)
      for (int c = 0; c < m.rows; ++c)
        for (const auto& [theta, coeff] : m.at(c, b).terms())
          a(c * k + pos[compose(theta, basis[s])], b * k + s) += static_cast<double>(coeff);
  if (a.cols() == 0) return true;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  return lu.rank() == a.cols();
}

LimitPresentation::LimitPresentation(DirectSystem system, std::vector<TrShape> shapes)
    : system_(std::move(system)), shapes_(std::move(shapes)) {
  check_system(system_);
  if (shapes_.size() != system_.stages.size())
    throw Error(ErrorCode::ShapeMismatch, "one shape per stage is required");
  for (std::size_t k = 0; k < shapes_.size(); ++k) {
    same_r(shapes_[k].r, shapes_.front().r);
    check_tr_stage(*system_.stages[k], shapes_[k]);
  }
  for (std::size_t k = 0; k < system_.connectors.size(); ++k) {
    const TrShape& next = k + 1 < shapes_.size() ? shapes_[k + 1] : shapes_.back();
    classes_.push_back(class_of_map(system_.connectors[k], shapes_[k], next));
    injective_.push_back(is_injective(classes_.back()));
  }
}

const TrShape& LimitPresentation::shape(int k) const {
  if (k < static_cast<int>(shapes_.size())) return shapes_[k];
  if (!system_.periodic) throw Error(ErrorCode::DepthUnavailable, "stage beyond the system", {k + 1});
  return shapes_.back();
}

const ModuleMapMatrix& LimitPresentation::connector_class(int k) const {
  if (k < static_cast<int>(classes_.size())) return classes_[k];
  if (!system_.periodic || classes_.empty())
    throw Error(ErrorCode::DepthUnavailable, "stage beyond the system", {k + 2});
  return classes_.back();
}

StageModule LimitPresentation::push(const ColimitElement& e, int to) const {
  if (to < e.stage)
    throw Error(ErrorCode::InvalidInput, "cannot push to an earlier stage", {e.stage + 1, to + 1});
  shape(to);
  if (e.value.size() != shape(e.stage).multiplicities.size())
    throw Error(ErrorCode::DimensionMismatch, "element does not match its stage",
                {static_cast<long>(e.value.size()),
                 static_cast<long>(shape(e.stage).multiplicities.size())});
  for (const auto& s : e.value) same_r(s.r(), r());
  StageModule x = e.value;
  for (int k = e.stage; k < to; ++k) x = induced_map(connector_class(k), x);
  return x;
}

bool LimitPresentation::injective_from(int m) const {
  for (std::size_t k = std::max(m, 0); k < injective_.size(); ++k)
    if (!injective_[k]) return false;
  // A periodic tail repeats the last connector.
  if (system_.periodic && !injective_.empty() && !injective_.back()) return false;
  return true;
}

Comparison equal_up_to_stage(const LimitPresentation& p, const ColimitElement& a,
                             const ColimitElement& b, int m) {
  if (p.push(a, m) == p.push(b, m)) return Comparison::Equal;
  return p.injective_from(m) ? Comparison::Distinct : Comparison::NotYetDistinguishable;
}

bool in_scale(const StageModule& x, std::span<const int> capacities) {
  if (x.size() != capacities.size())
    throw Error(ErrorCode::DimensionMismatch, "one capacity per summand is required",
                {static_cast<long>(x.size()), static_cast<long>(capacities.size())});
  for (std::size_t b = 0; b < x.size(); ++b) {
    std::vector<std::uint64_t> load(x[b].r() + 1, 0);
    for (const auto& [theta, c] : x[b].terms())
      for (int v : theta.values) load[v] += c;
    for (std::uint64_t l : load)
      if (l > static_cast<std::uint64_t>(std::max(capacities[b], 0))) return false;
  }
  return true;
}

GroupElement enveloping_group_stage(const StageModule& minus, const StageModule& plus) {
  if (minus.size() != plus.size())
    throw Error(ErrorCode::ShapeMismatch, "modules differ in length",
                {static_cast<long>(minus.size()), static_cast<long>(plus.size())});
  GroupElement g;
  for (std::size_t b = 0; b < plus.size(); ++b) {
    if (plus[b].r() != minus[b].r())
      throw Error(ErrorCode::ShapeMismatch, "band counts differ", {static_cast<long>(b) + 1});
    SemiringElement::Terms p = plus[b].terms(), q = minus[b].terms();
    for (auto& [theta, c] : p) {
      auto it = q.find(theta);
      if (it == q.end()) continue;
      const std::uint64_t common = std::min(c, it->second);
      c -= common;
      it->second -= common;
    }
    g.plus.emplace_back(plus[b].r(), std::move(p));
    g.minus.emplace_back(minus[b].r(), std::move(q));
  }
  return g;
}

bool same_difference(const GroupElement& a, const GroupElement& b) {
  if (a.plus.size() != b.plus.size()) return false;
  for (std::size_t k = 0; k < a.plus.size(); ++k)
    if (a.plus[k].r() != b.plus[k].r() ||
        !(a.plus[k] + b.minus[k] == b.plus[k] + a.minus[k]))
      return false;
  return true;
}

}  // namespace limitalg
