#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "nfbdd/core.hpp"

namespace nfbdd {

/// Canonical accepting path of a model, from the 1-sink up to q. Edge i joins
/// vertices[i] to vertices[i+1] and is the bit taken at a decision node or
/// the child position taken at an Or node.
struct DerivationPath {
  std::vector<NodeId> vertices;
  std::vector<std::uint32_t> edges;

  friend bool operator==(const DerivationPath&, const DerivationPath&) = default;
};

/// path(alpha, q): decisions follow alpha, Or nodes take their first child
/// having alpha as a model. Throws Error if alpha is not a model of q.
DerivationPath derivation_path(const Nfbdd& b, NodeId q, const Assignment& alpha);

/// Position in `p` of the last common prefix node: the largest i such that
/// the first i+1 vertices and the first i edges of both paths agree.
std::size_t lcpn_index(const DerivationPath& p, const DerivationPath& other);

inline NodeId lcpn(const DerivationPath& p, const DerivationPath& other) { return p.vertices[lcpn_index(p, other)]; }

/// I(alpha, q, l) for every position l of path(alpha, q): the models of q
/// whose derivation path leaves alpha's at q_l. alpha itself lands in the
/// last class. Enumerates mod(q), so var(q) must stay within `cap`.
std::map<std::size_t, std::vector<Assignment>> divergence_classes(const Nfbdd& b, NodeId q, const Assignment& alpha,
                                                                  std::size_t cap = kDefaultBruteForceCap);

}  // namespace nfbdd
