#pragma once

// Finite-depth spectrum of a direct system: Bratteli paths through the
// diagonal indices and the cylinder relation they carry.

#include <string>
#include <vector>

#include "limitalg/system.hpp"

namespace limitalg {

/// (i_1, ..., i_d) with i_{k+1} in the support of the image of e_{i_k i_k}.
using BratteliPath = std::vector<int>;

/// All paths of length depth in lexicographic order. Throws DepthUnavailable
/// past the last stage of a non-periodic system.
std::vector<BratteliPath> path_space(const DirectSystem& sys, int depth);

struct RelationPair {
  int x;      // positions in CylinderRelation::paths
  int y;
  int level;  // least 0-based stage k carrying a witness
  Edge unit;  // (x_k, y_k)
};

/// (x, y) is related when some stage-k matrix unit e_{x_k y_k} is carried by
/// one summand of every later connector onto e_{x_l y_l}, l = k..depth.
struct CylinderRelation {
  int depth = 0;
  std::vector<BratteliPath> paths;
  std::vector<RelationPair> pairs;  // ordered by (x, y)
  bool contains(int x, int y) const;
};

CylinderRelation cylinder_relation(const DirectSystem& sys, int depth);

struct RelationStatistics {
  long paths = 0;
  long pairs = 0;
  std::vector<long> out_degrees;  // sorted
  std::vector<long> in_degrees;   // sorted
  long antisymmetric = 0;  // (x, y) related but not (y, x)
  long symmetric = 0;      // (x, y) and (y, x) related, x != y
  std::vector<long> witness_histogram;  // pairs per witness level
  friend bool operator==(const RelationStatistics&, const RelationStatistics&) = default;
};

RelationStatistics relation_statistics(const CylinderRelation& rel);

struct DepthVerdict {
  /// True only when some statistic differs, which certifies non-isomorphism.
  bool distinguished = false;
  std::string statistic;  // first differing statistic, empty when compatible
  RelationStatistics first;
  RelationStatistics second;
};

DepthVerdict relation_isomorphic_at_depth(const DirectSystem& a, const DirectSystem& b, int depth);

}  // namespace limitalg
