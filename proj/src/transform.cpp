#include "nfbdd/transform.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace nfbdd {

namespace {

void require(bool ok, const char* stage, const char* property) {
  if (!ok) throw std::logic_error(std::string(stage) + " produced a diagram that is not " + property);
}

}  // namespace

MaybeFalse zero_reduce(const Nfbdd& b) {
  DiagramBuilder out(b.n_vars());
  std::vector<std::optional<NodeId>> map(b.node_count());  // nullopt: collapsed to the 0-sink
  for (NodeId q : b.bottom_up()) {
    const Node& node = b.node(q);
    std::optional<NodeId> r;
    switch (node.kind) {
      case NodeKind::Sink0:
        break;
      case NodeKind::Sink1:
        r = out.sink1();
        break;
      case NodeKind::Decision: {
        auto hi = map[node.hi().value];
        auto lo = map[node.lo().value];
        if (hi || lo) r = out.decision(node.var, hi ? *hi : out.sink0(), lo ? *lo : out.sink0());
        break;
      }
      case NodeKind::Or: {
        std::vector<NodeId> kids;
        for (NodeId c : node.children)
          if (auto m = map[c.value]) kids.push_back(*m);
        if (!kids.empty()) r = out.disjunction(std::move(kids));
        break;
      }
    }
    map[q.value] = r;
  }
  const auto root = map[b.source().value];
  if (!root) return ConstantFalse{};
  return std::move(out).build(*root);
}

Nfbdd flatten_or(const Nfbdd& b) {
  DiagramBuilder out(b.n_vars());
  std::vector<NodeId> map(b.node_count());
  for (NodeId q : b.bottom_up()) {
    const Node& node = b.node(q);
    switch (node.kind) {
      case NodeKind::Sink0:
        map[q.value] = out.sink0();
        break;
      case NodeKind::Sink1:
        map[q.value] = out.sink1();
        break;
      case NodeKind::Decision:
        map[q.value] = out.decision(node.var, map[node.hi().value], map[node.lo().value]);
        break;
      case NodeKind::Or: {
        // Children are already flat, so one level of splicing suffices.
        std::vector<NodeId> kids;
        bool tautology = false;
        for (NodeId c : node.children) {
          const NodeId m = map[c.value];
          const Node& child = out.node(m);
          if (child.kind == NodeKind::Sink1) {
            tautology = true;
            break;
          }
          if (child.kind == NodeKind::Or)
            kids.insert(kids.end(), child.children.begin(), child.children.end());
          else
            kids.push_back(m);
        }
        map[q.value] = tautology ? out.sink1() : out.disjunction(std::move(kids));
        break;
      }
    }
  }
  return std::move(out).build(map[b.source().value]);
}

Nfbdd one_complete(const Nfbdd& b) {
  DiagramBuilder out(b.n_vars());
  std::map<std::pair<std::uint32_t, VarSet>, NodeId> chains;

  auto pad = [&](NodeId c, const VarSet& have, const VarSet& want) {
    VarSet missing = want.minus(have);
    if (missing.empty()) return c;
    auto key = std::make_pair(c.value, missing);
    if (auto it = chains.find(key); it != chains.end()) return it->second;
    NodeId cur = c;
    for (auto v : missing.members()) cur = out.decision(v, cur, cur);
    chains.emplace(std::move(key), cur);
    return cur;
  };

  std::vector<NodeId> map(b.node_count());
  for (NodeId q : b.bottom_up()) {
    const Node& node = b.node(q);
    switch (node.kind) {
      case NodeKind::Sink0:
        map[q.value] = out.sink0();
        break;
      case NodeKind::Sink1:
        map[q.value] = out.sink1();
        break;
      case NodeKind::Decision:
      case NodeKind::Or: {
        VarSet want = b.vars(q);
        if (node.kind == NodeKind::Decision) want.set(node.var, false);
        Node copy = node;
        for (NodeId& c : copy.children) {
          const bool is_false = b.node(c).kind == NodeKind::Sink0;
          c = is_false ? map[c.value] : pad(map[c.value], b.vars(c), want);
        }
        map[q.value] = out.add(std::move(copy));
        break;
      }
    }
  }
  VarSet all(b.n_vars());
  for (std::uint32_t v = 1; v <= b.n_vars(); ++v) all.set(v);
  const NodeId root = pad(map[b.source().value], b.vars(b.source()), all);
  return std::move(out).build(root);
}

Nfbdd alternate(const Nfbdd& b) {
  DiagramBuilder out(b.n_vars());
  std::vector<NodeId> map(b.node_count());
  std::vector<std::optional<NodeId>> wrapper(b.node_count());

  auto wrapped = [&](NodeId old) {
    auto& w = wrapper[old.value];
    if (!w) w = out.disjunction({map[old.value]});
    return *w;
  };

  for (NodeId q : b.bottom_up()) {
    const Node& node = b.node(q);
    switch (node.kind) {
      case NodeKind::Sink0:
        map[q.value] = out.sink0();
        break;
      case NodeKind::Sink1:
        map[q.value] = out.sink1();
        break;
      case NodeKind::Decision: {
        auto child = [&](NodeId c) {
          return b.node(c).kind == NodeKind::Decision ? wrapped(c) : map[c.value];
        };
        map[q.value] = out.decision(node.var, child(node.hi()), child(node.lo()));
        break;
      }
      case NodeKind::Or: {
        std::vector<NodeId> kids;
        for (NodeId c : node.children) kids.push_back(map[c.value]);
        map[q.value] = out.disjunction(std::move(kids));
        break;
      }
    }
  }
  const NodeId src = b.source();
  const bool keep = b.node(src).kind == NodeKind::Or || (b.n_vars() == 0 && b.node(src).kind == NodeKind::Sink1);
  return std::move(out).build(keep ? map[src.value] : wrapped(src));
}

NormalForm normalize(const Nfbdd& b) {
  auto reduced = zero_reduce(b);
  if (std::holds_alternative<ConstantFalse>(reduced)) return ConstantFalse{};
  const Nfbdd& zr = std::get<Nfbdd>(reduced);
  require(is_zero_reduced(zr), "zero_reduce", "0-reduced");

  Nfbdd flat = flatten_or(zr);
  require(is_zero_reduced(flat), "flatten_or", "0-reduced");
  require(is_or_flattened(flat), "flatten_or", "Or-flattened");

  Nfbdd complete = one_complete(flat);
  require(is_zero_reduced(complete), "one_complete", "0-reduced");
  require(is_or_flattened(complete), "one_complete", "Or-flattened");
  require(is_one_complete(complete), "one_complete", "1-complete");

  Nfbdd alt = alternate(complete);
  require(is_zero_reduced(alt) && is_one_complete(alt), "alternate", "0-reduced and 1-complete");
  require(is_alternating(alt), "alternate", "alternating");

  LayerIndex index = layers(alt);
  return Normalized{std::move(alt), std::move(index)};
}

}  // namespace nfbdd
