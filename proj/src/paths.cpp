#include "nfbdd/paths.hpp"

#include <algorithm>

namespace nfbdd {

DerivationPath derivation_path(const Nfbdd& b, NodeId q, const Assignment& alpha) {
  if (!evaluate(b, q, alpha)) throw Error("assignment " + alpha.to_string() + " is not a model of the node");
  Evaluator ev(b);
  const std::uint64_t* bits = alpha.values().data().data();

  // Walk down from q, then reverse so the path starts at the 1-sink.
  DerivationPath down;
  NodeId cur = q;
  for (;;) {
    down.vertices.push_back(cur);
    const Node& node = b.node(cur);
    if (node.kind == NodeKind::Sink1) break;
    if (node.kind == NodeKind::Decision) {
      const bool bit = alpha.value(node.var);
      down.edges.push_back(bit);
      cur = node.child_for(bit);
      continue;
    }
    // Or node (a 0-sink cannot be reached on an accepting walk).
    std::uint32_t i = 0;
    while (!ev.eval(node.children[i], bits)) ++i;
    down.edges.push_back(i);
    cur = node.children[i];
  }
  std::reverse(down.vertices.begin(), down.vertices.end());
  std::reverse(down.edges.begin(), down.edges.end());
  return down;
}

std::size_t lcpn_index(const DerivationPath& p, const DerivationPath& other) {
  std::size_t i = 0;
  while (i + 1 < p.vertices.size() && i + 1 < other.vertices.size() && p.edges[i] == other.edges[i] &&
         p.vertices[i + 1] == other.vertices[i + 1])
    ++i;
  return i;
}

std::map<std::size_t, std::vector<Assignment>> divergence_classes(const Nfbdd& b, NodeId q, const Assignment& alpha,
                                                                  std::size_t cap) {
  const DerivationPath base = derivation_path(b, q, alpha);
  std::map<std::size_t, std::vector<Assignment>> classes;
  for (std::size_t l = 0; l < base.vertices.size(); ++l) classes[l];
  const Assignment self = alpha.restricted(b.vars(q));
  for (auto& other : enumerate_models(b, q, cap)) {
    const std::size_t l = other == self ? base.vertices.size() - 1 : lcpn_index(base, derivation_path(b, q, other));
    classes[l].push_back(std::move(other));
  }
  return classes;
}

}  // namespace nfbdd
