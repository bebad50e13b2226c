#include "test_support.hpp"

#include <functional>
#include <set>

#include "nfbdd/rng.hpp"

namespace support {

using nfbdd::NodeKind;

Nfbdd parse(std::string_view text) { return nfbdd::parse_nfbdd(text); }

bool path_exists(const Nfbdd& b, NodeId q, std::uint64_t bits) {
  const auto& node = b.node(q);
  switch (node.kind) {
    case NodeKind::Sink0:
      return false;
    case NodeKind::Sink1:
      return true;
    case NodeKind::Decision:
      return path_exists(b, (bits >> (node.var - 1)) & 1U ? node.hi() : node.lo(), bits);
    case NodeKind::Or:
      for (NodeId c : node.children)
        if (path_exists(b, c, bits)) return true;
      return false;
  }
  return false;
}

std::uint64_t path_count(const Nfbdd& b) {
  std::uint64_t c = 0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << b.n_vars()); ++bits) c += path_exists(b, b.source(), bits);
  return c;
}

std::uint64_t path_count(const Nfbdd& b, NodeId q) {
  std::set<std::uint32_t> vars;
  std::set<std::uint32_t> seen;
  std::function<void(NodeId)> dfs = [&](NodeId v) {
    if (!seen.insert(v.value).second) return;
    const auto& node = b.node(v);
    if (node.kind == NodeKind::Decision) vars.insert(node.var);
    for (NodeId c : node.children) dfs(c);
  };
  dfs(q);
  const std::vector<std::uint32_t> vs(vars.begin(), vars.end());
  std::uint64_t count = 0;
  for (std::uint64_t local = 0; local < (std::uint64_t{1} << vs.size()); ++local) {
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < vs.size(); ++i)
      if ((local >> i) & 1U) bits |= std::uint64_t{1} << (vs[i] - 1);
    count += path_exists(b, q, bits);
  }
  return count;
}

bool all_paths_free(const nfbdd::Diagram& d) {
  std::vector<std::uint32_t> on_path;
  std::function<bool(NodeId)> walk = [&](NodeId q) {
    const auto& node = d.nodes[q.value];
    if (node.kind == NodeKind::Decision) {
      for (auto v : on_path)
        if (v == node.var) return false;
      on_path.push_back(node.var);
    }
    bool ok = true;
    for (NodeId c : node.children) ok = ok && walk(c);
    if (node.kind == NodeKind::Decision) on_path.pop_back();
    return ok;
  };
  return walk(d.source);
}

bool accepting_paths_read_all(const Nfbdd& b) {
  std::vector<std::uint32_t> on_path;
  std::function<bool(NodeId)> walk = [&](NodeId q) {
    const auto& node = b.node(q);
    if (node.kind == NodeKind::Sink0) return true;
    if (node.kind == NodeKind::Sink1) {
      std::set<std::uint32_t> s(on_path.begin(), on_path.end());
      return s.size() == on_path.size() && s.size() == b.n_vars();
    }
    if (node.kind == NodeKind::Decision) on_path.push_back(node.var);
    bool ok = true;
    for (NodeId c : node.children) ok = ok && walk(c);
    if (node.kind == NodeKind::Decision) on_path.pop_back();
    return ok;
  };
  return walk(b.source());
}

bool dnf_truth(const nfbdd::DnfFormula& f, std::uint64_t bits) {
  for (const auto& term : f.terms) {
    bool all = true;
    for (int lit : term) {
      const bool v = (bits >> (std::abs(lit) - 1)) & 1U;
      all = all && (lit > 0 ? v : !v);
    }
    if (all) return true;
  }
  return false;
}

std::uint64_t dnf_truth_count(const nfbdd::DnfFormula& f) {
  std::uint64_t c = 0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << f.n_vars); ++bits) c += dnf_truth(f, bits);
  return c;
}

nfbdd::DnfFormula random_dnf(std::size_t n, std::uint64_t seed) {
  nfbdd::SplitMix64 rng(seed);
  nfbdd::DnfFormula f;
  f.n_vars = n;
  const std::size_t terms = 1 + rng() % 5;
  for (std::size_t t = 0; t < terms; ++t) {
    std::vector<int> term;
    for (std::size_t v = 1; v <= n; ++v)
      if (rng() % 3 == 0) term.push_back(rng() % 2 ? static_cast<int>(v) : -static_cast<int>(v));
    if (term.empty()) term.push_back(1);
    f.terms.push_back(term);
  }
  return f;
}

nfbdd::Diagram random_raw_diagram(std::size_t n, std::size_t nodes, std::uint64_t seed) {
  nfbdd::SplitMix64 rng(seed);
  nfbdd::Diagram d;
  d.n_vars = n;
  d.nodes.push_back(nfbdd::Node::sink0());
  d.nodes.push_back(nfbdd::Node::sink1());
  for (std::size_t i = 0; i < nodes; ++i) {
    const auto size = static_cast<std::uint32_t>(d.nodes.size());
    auto pick = [&] { return NodeId{static_cast<std::uint32_t>(rng() % size)}; };
    if (rng() % 4 == 0) {
      std::vector<NodeId> kids;
      for (std::size_t k = 0, m = 1 + rng() % 3; k < m; ++k) kids.push_back(pick());
      d.nodes.push_back(nfbdd::Node::disjunction(kids));
    } else {
      d.nodes.push_back(nfbdd::Node::decision(static_cast<std::uint32_t>(1 + rng() % n), pick(), pick()));
    }
  }
  // Single source: one Or over every node nobody points to.
  std::vector<bool> has_parent(d.nodes.size(), false);
  for (const auto& node : d.nodes)
    for (NodeId c : node.children) has_parent[c.value] = true;
  std::vector<NodeId> roots;
  for (std::uint32_t i = 0; i < d.nodes.size(); ++i)
    if (!has_parent[i]) roots.push_back(NodeId{i});
  if (roots.size() == 1) {
    d.source = roots[0];
  } else {
    d.nodes.push_back(nfbdd::Node::disjunction(roots));
    d.source = NodeId{static_cast<std::uint32_t>(d.nodes.size() - 1)};
  }
  return d;
}

std::vector<Nfbdd> generated(std::size_t count, std::size_t n_min, std::size_t n_max, std::uint64_t seed) {
  std::vector<Nfbdd> out;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = n_min + i % (n_max - n_min + 1);
    out.push_back(nfbdd::gen_random(n, 6 + (i * 7) % 20, nfbdd::derive_seed(seed, {i})));
  }
  return out;
}

}  // namespace support
