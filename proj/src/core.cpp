#include "nfbdd/core.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>
#include <utility>

namespace nfbdd {

namespace {

std::string node_name(NodeId q) { return "node " + std::to_string(q.value); }

/// Post-order (children first) over nodes reachable from `root`, visiting
/// children in sequence order. Assumes the graph is acyclic and in range.
std::vector<NodeId> post_order(const std::vector<Node>& nodes, NodeId root) {
  std::vector<NodeId> order;
  std::vector<std::uint8_t> state(nodes.size(), 0);  // 0 new, 1 open, 2 done
  std::vector<std::pair<NodeId, std::size_t>> stack{{root, 0}};
  state[root.value] = 1;
  while (!stack.empty()) {
    auto& [q, next] = stack.back();
    const auto& ch = nodes[q.value].children;
    if (next < ch.size()) {
      NodeId c = ch[next++];
      if (state[c.value] == 0) {
        state[c.value] = 1;
        stack.emplace_back(c, 0);
      }
      continue;
    }
    state[q.value] = 2;
    order.push_back(q);
    stack.pop_back();
  }
  return order;
}

std::uint64_t checked_enumeration_size(std::size_t n, std::size_t cap) {
  if (n > cap || n >= 63)
    throw CapExceeded("brute-force enumeration over " + std::to_string(n) + " variables exceeds cap " +
                      std::to_string(cap));
  return std::uint64_t{1} << n;
}

/// Scatters the low bits of `bits` onto the listed variables.
void scatter(std::span<const std::uint32_t> members, std::uint64_t bits, std::vector<std::uint64_t>& words) {
  std::fill(words.begin(), words.end(), 0);
  for (std::size_t i = 0; i < members.size(); ++i)
    if ((bits >> i) & 1U) {
      const std::uint32_t v = members[i] - 1;
      words[v >> 6] |= std::uint64_t{1} << (v & 63);
    }
}

}  // namespace

std::string ValidationReport::to_string() const {
  if (violations.empty()) return "ok";
  std::string s;
  for (const auto& v : violations) {
    if (!s.empty()) s += "; ";
    s += v.message;
  }
  return s;
}

ValidationReport validate(const Diagram& d) {
  ValidationReport report;
  auto add = [&](Violation::Kind k, std::optional<NodeId> q, std::string msg) {
    report.violations.push_back({k, q, std::move(msg)});
  };
  const std::size_t n = d.nodes.size();
  if (n == 0 || d.source.value >= n) {
    add(Violation::Kind::BadSource, std::nullopt, "source " + std::to_string(d.source.value) + " is not a node");
    return report;
  }

  bool dangling = false;
  std::optional<NodeId> sink0, sink1;
  for (std::uint32_t i = 0; i < n; ++i) {
    const NodeId q{i};
    const Node& node = d.nodes[i];
    switch (node.kind) {
      case NodeKind::Sink0:
      case NodeKind::Sink1: {
        auto& seen = node.kind == NodeKind::Sink0 ? sink0 : sink1;
        if (seen)
          add(Violation::Kind::DuplicateSink, q, node_name(q) + " duplicates the " +
                                                     (node.kind == NodeKind::Sink0 ? "0" : "1") + "-sink");
        else
          seen = q;
        if (!node.children.empty()) add(Violation::Kind::BadArity, q, node_name(q) + ": sink with children");
        break;
      }
      case NodeKind::Decision:
        if (node.children.size() != 2)
          add(Violation::Kind::BadArity, q, node_name(q) + ": decision node needs exactly two children");
        if (node.var == 0 || node.var > d.n_vars)
          add(Violation::Kind::VariableOutOfRange, q,
              node_name(q) + ": variable x" + std::to_string(node.var) + " outside [1, " +
                  std::to_string(d.n_vars) + "]");
        break;
      case NodeKind::Or:
        if (node.children.empty()) add(Violation::Kind::EmptyOr, q, node_name(q) + ": Or node without children");
        break;
    }
    for (NodeId c : node.children)
      if (c.value >= n) {
        dangling = true;
        add(Violation::Kind::DanglingChild, q,
            node_name(q) + ": child " + std::to_string(c.value) + " does not exist");
      }
  }

  // Kahn's algorithm on in-range edges: in-degrees give the sources, leftovers a cycle.
  std::vector<std::uint32_t> indeg(n, 0);
  for (const auto& node : d.nodes)
    for (NodeId c : node.children)
      if (c.value < n) ++indeg[c.value];
  std::vector<NodeId> sources;
  for (std::uint32_t i = 0; i < n; ++i)
    if (indeg[i] == 0) sources.push_back(NodeId{i});
  if (sources.size() > 1) {
    std::string ids;
    for (auto s : sources) ids += " " + std::to_string(s.value);
    add(Violation::Kind::MultipleSources, std::nullopt, "multiple sources:" + ids);
  }
  if (indeg[d.source.value] != 0)
    add(Violation::Kind::BadSource, d.source, "declared source " + node_name(d.source) + " has incoming edges");

  std::vector<NodeId> topo;  // parents first
  {
    auto deg = indeg;
    std::vector<NodeId> ready = sources;
    while (!ready.empty()) {
      NodeId q = ready.back();
      ready.pop_back();
      topo.push_back(q);
      for (NodeId c : d.nodes[q.value].children)
        if (c.value < n && --deg[c.value] == 0) ready.push_back(c);
    }
  }
  if (topo.size() != n) {
    add(Violation::Kind::Cycle, std::nullopt, "the graph has a cycle");
    return report;
  }
  if (dangling) return report;

  // Freeness: x must not occur below a decision on x.
  std::vector<VarSet> vs(n, VarSet(d.n_vars));
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const Node& node = d.nodes[it->value];
    VarSet below(d.n_vars);
    for (NodeId c : node.children) below |= vs[c.value];
    if (node.kind == NodeKind::Decision && node.var >= 1 && node.var <= d.n_vars) {
      if (below.test(node.var))
        add(Violation::Kind::RepeatedVariable, *it,
            "variable x" + std::to_string(node.var) + " repeated on a path through " + node_name(*it));
      below.set(node.var);
    }
    vs[it->value] = std::move(below);
  }
  return report;
}

Nfbdd::Nfbdd(Diagram d) : d_(std::move(d)) {
  if (auto report = validate(d_); !report.ok()) throw InvalidDiagram(std::move(report));
  order_ = post_order(d_.nodes, d_.source);
  vars_.assign(d_.nodes.size(), VarSet(d_.n_vars));
  for (NodeId q : order_) {
    const Node& node = d_.nodes[q.value];
    size_ += node.children.size();
    VarSet& v = vars_[q.value];
    for (NodeId c : node.children) v |= vars_[c.value];
    if (node.kind == NodeKind::Decision) v.set(node.var);
    if (node.kind == NodeKind::Sink0) sink0_ = q;
    if (node.kind == NodeKind::Sink1) sink1_ = q;
  }
}

NodeId DiagramBuilder::sink0() {
  if (!sink0_) sink0_ = add(Node::sink0());
  return *sink0_;
}

NodeId DiagramBuilder::sink1() {
  if (!sink1_) sink1_ = add(Node::sink1());
  return *sink1_;
}

NodeId DiagramBuilder::add(Node n) {
  nodes_.push_back(std::move(n));
  return NodeId{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Nfbdd DiagramBuilder::build(NodeId source) && {
  const auto order = post_order(nodes_, source);
  std::vector<std::uint32_t> renum(nodes_.size(), std::numeric_limits<std::uint32_t>::max());
  for (std::uint32_t i = 0; i < order.size(); ++i) renum[order[i].value] = i;
  Diagram d;
  d.n_vars = n_vars_;
  d.nodes.reserve(order.size());
  for (NodeId q : order) {
    Node node = std::move(nodes_[q.value]);
    for (NodeId& c : node.children) c = NodeId{renum[c.value]};
    d.nodes.push_back(std::move(node));
  }
  d.source = NodeId{renum[source.value]};
  nodes_.clear();
  return Nfbdd(std::move(d));
}

Evaluator::Evaluator(const Nfbdd& b) : b_(&b), seen_(b.node_count(), 0), value_(b.node_count(), 0) {}

bool Evaluator::eval(NodeId q, const std::uint64_t* bits) {
  if (++stamp_ == 0) {
    std::fill(seen_.begin(), seen_.end(), 0);
    stamp_ = 1;
  }
  return visit(q, bits);
}

bool Evaluator::visit(NodeId q, const std::uint64_t* bits) {
  const Node& node = b_->node(q);
  switch (node.kind) {
    case NodeKind::Sink0:
      return false;
    case NodeKind::Sink1:
      return true;
    case NodeKind::Decision: {
      const std::uint32_t i = node.var - 1;
      return visit(node.child_for((bits[i >> 6] >> (i & 63)) & 1U), bits);
    }
    case NodeKind::Or:
      break;
  }
  if (seen_[q.value] == stamp_) return value_[q.value];
  bool result = false;
  for (NodeId c : node.children)
    if (visit(c, bits)) {
      result = true;
      break;
    }
  seen_[q.value] = stamp_;
  value_[q.value] = result;
  return result;
}

const VarSet& vars(const Nfbdd& b, NodeId q) {
  if (!b.contains(q)) throw Error("unknown node id " + std::to_string(q.value));
  return b.vars(q);
}

bool evaluate(const Nfbdd& b, NodeId q, const Assignment& alpha) {
  const VarSet& need = vars(b, q);
  if (alpha.n_vars() != b.n_vars()) throw Error("assignment width does not match the diagram");
  if (!need.subset_of(alpha.vars())) {
    const auto missing = need.minus(alpha.vars()).members();
    throw Error("assignment does not bind x" + std::to_string(missing.front()));
  }
  Evaluator ev(b);
  return ev.eval(q, alpha.values().data().data());
}

std::uint64_t count_exact(const Nfbdd& b, std::size_t cap) {
  const std::uint64_t total = checked_enumeration_size(b.n_vars(), cap);
  Evaluator ev(b);
  std::vector<std::uint64_t> words(BitVec::word_count(b.n_vars()) + 1, 0);
  std::uint64_t count = 0;
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    words[0] = bits;
    count += ev.eval(b.source(), words.data());
  }
  return count;
}

std::uint64_t count_models(const Nfbdd& b, NodeId q, std::size_t cap) {
  const auto members = vars(b, q).members();
  const std::uint64_t total = checked_enumeration_size(members.size(), cap);
  Evaluator ev(b);
  std::vector<std::uint64_t> words(BitVec::word_count(b.n_vars()) + 1, 0);
  std::uint64_t count = 0;
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    scatter(members, bits, words);
    count += ev.eval(q, words.data());
  }
  return count;
}

std::vector<Assignment> enumerate_models(const Nfbdd& b, NodeId q, std::size_t cap) {
  const VarSet& vq = vars(b, q);
  const auto members = vq.members();
  const std::uint64_t total = checked_enumeration_size(members.size(), cap);
  Evaluator ev(b);
  std::vector<std::uint64_t> words(BitVec::word_count(b.n_vars()) + 1, 0);
  std::vector<Assignment> out;
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    scatter(members, bits, words);
    if (ev.eval(q, words.data())) out.push_back(Assignment::over(vq, bits));
  }
  return out;
}

bool is_zero_reduced(const Nfbdd& b) {
  for (NodeId q : b.bottom_up()) {
    const Node& node = b.node(q);
    auto is_false = [&](NodeId c) { return b.node(c).kind == NodeKind::Sink0; };
    if (node.kind == NodeKind::Decision && is_false(node.hi()) && is_false(node.lo())) return false;
    if (node.kind == NodeKind::Or && std::any_of(node.children.begin(), node.children.end(), is_false))
      return false;
  }
  // A lone 0-sink source is the constant-false function, not a 0-reduced diagram.
  return b.node(b.source()).kind != NodeKind::Sink0;
}

bool is_or_flattened(const Nfbdd& b) {
  for (NodeId q : b.bottom_up()) {
    const Node& node = b.node(q);
    if (node.kind != NodeKind::Or) continue;
    for (NodeId c : node.children) {
      const auto k = b.node(c).kind;
      if (k == NodeKind::Or || k == NodeKind::Sink0 || k == NodeKind::Sink1) return false;
    }
  }
  return true;
}

bool is_one_complete(const Nfbdd& b) {
  if (b.node(b.source()).kind == NodeKind::Sink0) return true;
  if (b.vars(b.source()).count() != b.n_vars()) return false;
  for (NodeId q : b.bottom_up()) {
    const Node& node = b.node(q);
    VarSet want = b.vars(q);
    if (node.kind == NodeKind::Decision) want.set(node.var, false);
    for (NodeId c : node.children) {
      if (b.node(c).kind == NodeKind::Sink0) continue;
      if (b.vars(c) != want) return false;
    }
  }
  return true;
}

bool is_alternating(const Nfbdd& b) {
  const auto source_kind = b.node(b.source()).kind;
  if (source_kind != NodeKind::Or && !(b.n_vars() == 0 && source_kind == NodeKind::Sink1)) return false;
  for (NodeId q : b.bottom_up()) {
    const Node& node = b.node(q);
    for (NodeId c : node.children) {
      const auto k = b.node(c).kind;
      if (node.kind == NodeKind::Or && k != NodeKind::Decision) return false;
      if (node.kind == NodeKind::Decision && k == NodeKind::Decision) return false;
    }
  }
  return true;
}

LayerIndex layers(const Nfbdd& b) {
  if (!is_zero_reduced(b)) throw NotNormalForm("diagram is not 0-reduced");
  if (!is_one_complete(b)) throw NotNormalForm("diagram is not 1-complete");
  if (!is_alternating(b)) throw NotNormalForm("diagram is not alternating");

  LayerIndex index;
  index.layers.resize(2 * b.n_vars() + 1);
  index.layer_of.assign(b.node_count(), 0);
  for (NodeId q : b.bottom_up()) {
    const Node& node = b.node(q);
    std::uint32_t layer = 0;
    if (node.kind == NodeKind::Decision) layer = static_cast<std::uint32_t>(2 * b.vars(q).count() - 1);
    if (node.kind == NodeKind::Or) layer = static_cast<std::uint32_t>(2 * b.vars(q).count());
    for (NodeId c : node.children) {
      if (b.node(c).kind == NodeKind::Sink0) continue;
      if (index.layer_of[c.value] + 1 != layer)
        throw NotNormalForm("child of " + node_name(q) + " is not in the layer below");
    }
    index.layer_of[q.value] = layer;
    index.layers[layer].push_back(q);
  }
  return index;
}

bool structurally_equal(const Nfbdd& a, const Nfbdd& b) {
  if (a.n_vars() != b.n_vars()) return false;
  std::unordered_map<std::uint32_t, std::uint32_t> fwd, bwd;
  std::vector<std::pair<NodeId, NodeId>> stack{{a.source(), b.source()}};
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    auto f = fwd.find(x.value);
    auto g = bwd.find(y.value);
    if (f != fwd.end() || g != bwd.end()) {
      if (f == fwd.end() || g == bwd.end() || f->second != y.value || g->second != x.value) return false;
      continue;
    }
    fwd[x.value] = y.value;
    bwd[y.value] = x.value;
    const Node& nx = a.node(x);
    const Node& ny = b.node(y);
    if (nx.kind != ny.kind || nx.var != ny.var || nx.children.size() != ny.children.size()) return false;
    for (std::size_t i = 0; i < nx.children.size(); ++i) stack.emplace_back(nx.children[i], ny.children[i]);
  }
  return a.node_count() == fwd.size() && b.node_count() == bwd.size();
}

}  // namespace nfbdd
