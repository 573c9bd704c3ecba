#include "limitalg/spectrum.hpp"

#include <algorithm>
#include <string>

namespace limitalg {

namespace {

void check_depth(const DirectSystem& sys, int depth) {
  check_system(sys);
  if (depth < 1) throw Error(ErrorCode::InvalidInput, "depth must be at least 1");
  if (!sys.periodic && depth > static_cast<int>(sys.stages.size()))
    throw Error(ErrorCode::DepthUnavailable,
                "depth " + std::to_string(depth) + " exceeds " +
                    std::to_string(sys.stages.size()) + " stages",
                {depth});
}

const StandardRegularMap& connector(const DirectSystem& sys, int k) {
  return sys.connectors[std::min<std::size_t>(k, sys.connectors.size() - 1)];
}

// For each target index: the summand that hits it and its preimage.
struct Preimages {
  std::vector<int> owner;
  std::vector<int> source;
};

Preimages preimages(const StandardRegularMap& c) {
  const int n2 = c.target()->size();
  Preimages p{std::vector<int>(n2, -1), std::vector<int>(n2, -1)};
  for (int s = 0; s < static_cast<int>(c.summands().size()); ++s)
    for (int i = 0; i < c.source()->size(); ++i)
      if (c.summands()[s](i) >= 0) {
        p.owner[c.summands()[s](i)] = s;
        p.source[c.summands()[s](i)] = i;
      }
  return p;
}

}  // namespace

std::vector<BratteliPath> path_space(const DirectSystem& sys, int depth) {
  check_depth(sys, depth);
  std::vector<BratteliPath> paths;
  for (int i = 0; i < stage(sys, 0)->size(); ++i) paths.push_back({i});
  for (int k = 0; k + 1 < depth; ++k) {
    const auto& c = connector(sys, k);
    std::vector<BratteliPath> next;
    for (const auto& p : paths)
      for (int t : c.diagonal_support(p.back())) {
        next.push_back(p);
        next.back().push_back(t);
      }
    paths = std::move(next);
  }
  return paths;
}

bool CylinderRelation::contains(int x, int y) const {
  auto it = std::lower_bound(pairs.begin(), pairs.end(), std::pair(x, y),
                             [](const RelationPair& p, const std::pair<int, int>& key) {
                               return std::pair(p.x, p.y) < key;
                             });
  return it != pairs.end() && it->x == x && it->y == y;
}

CylinderRelation cylinder_relation(const DirectSystem& sys, int depth) {
  CylinderRelation rel;
  rel.depth = depth;
  rel.paths = path_space(sys, depth);
  std::vector<Preimages> pre;
  for (int k = 0; k + 1 < depth; ++k) pre.push_back(preimages(connector(sys, k)));
  std::vector<const DigraphAlgebra*> stages;
  for (int k = 0; k < depth; ++k) stages.push_back(stage(sys, k).get());

  const int np = static_cast<int>(rel.paths.size());
  for (int x = 0; x < np; ++x)
    for (int y = 0; y < np; ++y) {
      const auto& px = rel.paths[x];
      const auto& py = rel.paths[y];
      // The pair must be carried by a single summand from the witness level on.
      int from = 0;
      for (int l = depth - 2; l >= 0; --l) {
        const auto& p = pre[l];
        if (p.owner[px[l + 1]] != p.owner[py[l + 1]]) {
          from = l + 1;
          break;
        }
      }
      for (int k = from; k < depth; ++k)
        if (stages[k]->has_edge(px[k], py[k])) {
          rel.pairs.push_back({x, y, k, Edge{px[k], py[k]}});
          break;
        }
    }
  return rel;
}

RelationStatistics relation_statistics(const CylinderRelation& rel) {
  RelationStatistics st;
  const int np = static_cast<int>(rel.paths.size());
  st.paths = np;
  st.pairs = static_cast<long>(rel.pairs.size());
  st.out_degrees.assign(np, 0);
  st.in_degrees.assign(np, 0);
  st.witness_histogram.assign(rel.depth, 0);
  for (const auto& p : rel.pairs) {
    ++st.out_degrees[p.x];
    ++st.in_degrees[p.y];
    ++st.witness_histogram[p.level];
    if (p.x == p.y) continue;
    if (rel.contains(p.y, p.x))
      ++st.symmetric;
    else
      ++st.antisymmetric;
  }
  std::sort(st.out_degrees.begin(), st.out_degrees.end());
  std::sort(st.in_degrees.begin(), st.in_degrees.end());
  return st;
}

DepthVerdict relation_isomorphic_at_depth(const DirectSystem& a, const DirectSystem& b,
                                          int depth) {
  DepthVerdict v;
  v.first = relation_statistics(cylinder_relation(a, depth));
  v.second = relation_statistics(cylinder_relation(b, depth));
  const auto& s = v.first;
  const auto& t = v.second;
  if (s.paths != t.paths)
    v.statistic = "paths";
  else if (s.antisymmetric != t.antisymmetric)
    v.statistic = "antisymmetric";
  else if (s.symmetric != t.symmetric)
    v.statistic = "symmetric";
  else if (s.pairs != t.pairs)
    v.statistic = "pairs";
  else if (s.out_degrees != t.out_degrees)
    v.statistic = "out_degrees";
  else if (s.in_degrees != t.in_degrees)
    v.statistic = "in_degrees";
  else if (s.witness_histogram != t.witness_histogram)
    v.statistic = "witness_histogram";
  v.distinguished = !v.statistic.empty();
  return v;
}

}  // namespace limitalg
