#include "nfbdd/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_map>

#include "nfbdd/rng.hpp"

namespace nfbdd {

namespace {

struct Line {
  std::size_t number;
  std::vector<std::string_view> tokens;
};

/// Non-blank, non-comment lines split on whitespace.
std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++number;
    pos = end + 1;
    Line line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      std::size_t j = i;
      while (j < raw.size() && !std::isspace(static_cast<unsigned char>(raw[j]))) ++j;
      if (j > i) line.tokens.push_back(raw.substr(i, j - i));
      i = j;
    }
    if (line.tokens.empty() || line.tokens.front() == "c") continue;
    lines.push_back(std::move(line));
  }
  return lines;
}

template <class Int>
Int to_int(std::string_view tok, std::size_t line, const char* what) {
  Int v{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(line, std::string("expected ") + what + ", got '" + std::string(tok) + "'");
  return v;
}

struct RawNode {
  std::uint64_t id;
  std::size_t line;
  char kind;
  std::uint64_t var = 0;
  std::vector<std::uint64_t> children;
};

}  // namespace

Nfbdd parse_nfbdd(std::string_view text) {
  const auto lines = tokenize(text);
  std::optional<std::size_t> n_vars, n_nodes;
  std::optional<std::uint64_t> source;
  std::size_t source_line = 0;
  std::vector<RawNode> raw;

  for (const auto& [ln, tok] : lines) {
    if (tok[0] == "p") {
      if (n_vars) throw ParseError(ln, "duplicate header");
      if (tok.size() != 4 || tok[1] != "nfbdd") throw ParseError(ln, "expected 'p nfbdd <n_vars> <n_nodes>'");
      n_vars = to_int<std::size_t>(tok[2], ln, "variable count");
      n_nodes = to_int<std::size_t>(tok[3], ln, "node count");
      continue;
    }
    if (!n_vars) throw ParseError(ln, "missing 'p nfbdd' header");
    if (tok[0] == "s") {
      if (source) throw ParseError(ln, "duplicate source line");
      if (tok.size() != 2) throw ParseError(ln, "expected 's <source_id>'");
      source = to_int<std::uint64_t>(tok[1], ln, "source id");
      source_line = ln;
      continue;
    }
    if (source) throw ParseError(ln, "node line after the source line");
    if (tok.size() < 2 || tok[1].size() != 1) throw ParseError(ln, "expected '<id> F|T|d|o ...'");
    RawNode node{to_int<std::uint64_t>(tok[0], ln, "node id"), ln, tok[1][0], 0, {}};
    if (node.id == 0) throw ParseError(ln, "node ids must be positive");
    switch (node.kind) {
      case 'F':
      case 'T':
        if (tok.size() != 2) throw ParseError(ln, "sink lines take no arguments");
        break;
      case 'd':
        if (tok.size() != 5) throw ParseError(ln, "expected '<id> d <var> <hi_id> <lo_id>'");
        node.var = to_int<std::uint64_t>(tok[2], ln, "variable");
        node.children = {to_int<std::uint64_t>(tok[3], ln, "child id"), to_int<std::uint64_t>(tok[4], ln, "child id")};
        break;
      case 'o': {
        if (tok.size() < 3) throw ParseError(ln, "expected '<id> o <k> <children...>'");
        const auto k = to_int<std::size_t>(tok[2], ln, "child count");
        if (tok.size() != 3 + k)
          throw ParseError(ln, "Or node " + std::to_string(node.id) + " declares " + std::to_string(k) +
                                   " children but lists " + std::to_string(tok.size() - 3));
        for (std::size_t i = 0; i < k; ++i) node.children.push_back(to_int<std::uint64_t>(tok[3 + i], ln, "child id"));
        break;
      }
      default:
        throw ParseError(ln, "unknown node kind '" + std::string(tok[1]) + "'");
    }
    raw.push_back(std::move(node));
  }
  if (!n_vars) throw ParseError(0, "missing 'p nfbdd' header");
  if (!source) throw ParseError(0, "missing 's <source_id>' line");
  if (raw.size() != *n_nodes)
    throw ParseError(0, "header declares " + std::to_string(*n_nodes) + " nodes but the file has " +
                            std::to_string(raw.size()));

  // Resolve file ids; duplicate sinks share one node.
  std::unordered_map<std::uint64_t, std::uint32_t> index;
  std::vector<std::size_t> node_line;
  std::vector<std::uint64_t> file_id;
  std::optional<std::uint32_t> sink_index[2];
  Diagram d;
  d.n_vars = *n_vars;
  for (const auto& node : raw) {
    if (index.count(node.id)) throw ParseError(node.line, "repeated node id " + std::to_string(node.id));
    if (node.kind == 'F' || node.kind == 'T') {
      auto& slot = sink_index[node.kind == 'T'];
      if (!slot) {
        slot = static_cast<std::uint32_t>(d.nodes.size());
        d.nodes.push_back(node.kind == 'T' ? Node::sink1() : Node::sink0());
        node_line.push_back(node.line);
        file_id.push_back(node.id);
      }
      index[node.id] = *slot;
      continue;
    }
    if (node.kind == 'd' && (node.var == 0 || node.var > *n_vars))
      throw ParseError(node.line, "node " + std::to_string(node.id) + ": variable " + std::to_string(node.var) +
                                      " outside [1, " + std::to_string(*n_vars) + "]");
    index[node.id] = static_cast<std::uint32_t>(d.nodes.size());
    d.nodes.push_back(node.kind == 'd' ? Node{NodeKind::Decision, static_cast<std::uint32_t>(node.var), {}}
                                       : Node::disjunction({}));
    node_line.push_back(node.line);
    file_id.push_back(node.id);
  }
  for (const auto& node : raw) {
    if (node.children.empty()) continue;
    auto& target = d.nodes[index.at(node.id)].children;
    for (auto c : node.children) {
      auto it = index.find(c);
      if (it == index.end())
        throw ParseError(node.line, "node " + std::to_string(node.id) + " references undefined id " + std::to_string(c));
      target.push_back(NodeId{it->second});
    }
  }
  auto src = index.find(*source);
  if (src == index.end()) throw ParseError(source_line, "source references undefined id " + std::to_string(*source));
  d.source = NodeId{src->second};

  try {
    return Nfbdd(std::move(d));
  } catch (const InvalidDiagram& e) {
    const auto& v = e.report().violations.front();
    if (v.node)
      throw ParseError(node_line[v.node->value],
                       "node " + std::to_string(file_id[v.node->value]) + ": " + v.message);
    throw ParseError(0, v.message);
  }
}

std::string serialize_nfbdd(const Nfbdd& b) {
  std::vector<std::uint32_t> id(b.node_count(), 0);
  std::uint32_t next = 1;
  for (NodeId q : b.bottom_up()) id[q.value] = next++;
  std::ostringstream out;
  out << "p nfbdd " << b.n_vars() << ' ' << b.bottom_up().size() << '\n';
  for (NodeId q : b.bottom_up()) {
    const Node& node = b.node(q);
    out << id[q.value];
    switch (node.kind) {
      case NodeKind::Sink0:
        out << " F";
        break;
      case NodeKind::Sink1:
        out << " T";
        break;
      case NodeKind::Decision:
        out << " d " << node.var << ' ' << id[node.hi().value] << ' ' << id[node.lo().value];
        break;
      case NodeKind::Or:
        out << " o " << node.children.size();
        for (NodeId c : node.children) out << ' ' << id[c.value];
        break;
    }
    out << '\n';
  }
  out << "s " << id[b.source().value] << '\n';
  return out.str();
}

DnfFormula parse_dnf(std::string_view text) {
  const auto lines = tokenize(text);
  DnfFormula f;
  std::optional<std::size_t> n_terms;
  for (const auto& [ln, tok] : lines) {
    if (tok[0] == "p") {
      if (n_terms) throw ParseError(ln, "duplicate header");
      if (tok.size() != 4 || tok[1] != "dnf") throw ParseError(ln, "expected 'p dnf <n_vars> <n_terms>'");
      f.n_vars = to_int<std::size_t>(tok[2], ln, "variable count");
      n_terms = to_int<std::size_t>(tok[3], ln, "term count");
      continue;
    }
    if (!n_terms) throw ParseError(ln, "missing 'p dnf' header");
    if (tok.back() != "0") throw ParseError(ln, "term must end with 0");
    std::vector<int> term;
    std::set<int> seen;
    for (std::size_t i = 0; i + 1 < tok.size(); ++i) {
      const int lit = to_int<int>(tok[i], ln, "literal");
      if (lit == 0) throw ParseError(ln, "0 inside a term");
      const int var = lit < 0 ? -lit : lit;
      if (static_cast<std::size_t>(var) > f.n_vars)
        throw ParseError(ln, "variable " + std::to_string(var) + " outside [1, " + std::to_string(f.n_vars) + "]");
      if (!seen.insert(var).second)
        throw ParseError(ln, "contradictory term: variable " + std::to_string(var) + " repeated");
      term.push_back(lit);
    }
    f.terms.push_back(std::move(term));
  }
  if (!n_terms) throw ParseError(0, "missing 'p dnf' header");
  if (f.terms.size() != *n_terms)
    throw ParseError(0, "header declares " + std::to_string(*n_terms) + " terms but the file has " +
                            std::to_string(f.terms.size()));
  return f;
}

Nfbdd dnf_to_nfbdd(const DnfFormula& f) {
  DiagramBuilder out(f.n_vars);
  if (f.terms.empty()) return std::move(out).build(out.sink0());
  std::vector<NodeId> chains;
  for (auto term : f.terms) {
    std::sort(term.begin(), term.end(), [](int a, int b) { return std::abs(a) < std::abs(b); });
    NodeId cur = out.sink1();
    for (auto it = term.rbegin(); it != term.rend(); ++it) {
      const auto var = static_cast<std::uint32_t>(std::abs(*it));
      cur = *it > 0 ? out.decision(var, cur, out.sink0()) : out.decision(var, out.sink0(), cur);
    }
    chains.push_back(cur);
  }
  return std::move(out).build(out.disjunction(std::move(chains)));
}

bool dnf_satisfied(const DnfFormula& f, std::uint64_t bits) {
  return std::any_of(f.terms.begin(), f.terms.end(), [&](const std::vector<int>& term) {
    return std::all_of(term.begin(), term.end(), [&](int lit) {
      const bool value = (bits >> (std::abs(lit) - 1)) & 1U;
      return lit > 0 ? value : !value;
    });
  });
}

Nfbdd gen_random(std::size_t n, std::size_t target_edges, std::uint64_t seed) {
  if (n < 1) throw Error("gen_random needs at least one variable");
  if (target_edges < 4) throw Error("gen_random needs a target of at least 4 edges");
  SplitMix64 rng(derive_seed(seed, {n, target_edges}));
  auto below = [&](std::size_t k) { return static_cast<std::size_t>(rng() % k); };
  auto chance = [&](double p) { return uniform01(rng) < p; };

  struct Entry {
    NodeId id;
    VarSet vars;
    std::size_t parents = 0;
  };
  DiagramBuilder out(n);
  std::vector<Entry> pool;  // inner nodes only
  const NodeId one = out.sink1();
  const NodeId zero = out.sink0();
  VarSet used(n);
  std::size_t edges = 0;
  std::size_t roots = 0;

  // Children are drawn mostly from recent nodes so the diagram grows deep.
  auto pick = [&]() -> std::size_t {
    if (pool.size() > 4 && chance(0.6)) return pool.size() - 1 - below(4);
    return below(pool.size());
  };
  auto adopt = [&](std::size_t i) {
    if (pool[i].parents++ == 0) --roots;
  };

  for (std::size_t attempts = 0; edges + roots < target_edges && attempts < 100 * target_edges; ++attempts) {
    const bool make_or = pool.size() >= 2 && chance(0.35);
    if (make_or) {
      const std::size_t k = std::min<std::size_t>(pool.size(), 2 + below(2));
      std::vector<std::size_t> picks;
      while (picks.size() < k) {
        std::size_t i = pick();
        if (std::find(picks.begin(), picks.end(), i) == picks.end()) picks.push_back(i);
      }
      std::vector<NodeId> kids;
      VarSet vs(n);
      for (auto i : picks) {
        kids.push_back(pool[i].id);
        vs |= pool[i].vars;
        adopt(i);
      }
      pool.push_back({out.disjunction(std::move(kids)), vs, 0});
      ++roots;
      edges += k;
      continue;
    }

    // Decision: each child is a sink or an earlier node; the label must be fresh below.
    std::optional<std::size_t> a, b;
    if (!pool.empty() && chance(0.75)) a = pick();
    if (!pool.empty() && chance(0.3)) b = chance(0.3) && a ? a : std::optional<std::size_t>(pick());
    VarSet below_vars(n);
    if (a) below_vars |= pool[*a].vars;
    if (b) below_vars |= pool[*b].vars;
    VarSet free_vars(n);
    for (std::uint32_t v = 1; v <= n; ++v) free_vars.set(v);
    free_vars = free_vars.minus(below_vars);
    if (free_vars.empty()) continue;
    auto candidates = free_vars.minus(used).members();
    if (candidates.empty() || chance(0.5)) candidates = free_vars.members();
    const std::uint32_t x = candidates[below(candidates.size())];
    used.set(x);

    NodeId hi = a ? pool[*a].id : one;
    NodeId lo = b ? pool[*b].id : (chance(0.7) ? zero : one);
    if (chance(0.5)) std::swap(hi, lo);
    if (a) adopt(*a);
    if (b && b != a) adopt(*b);
    VarSet vs = below_vars;
    vs.set(x);
    pool.push_back({out.decision(x, hi, lo), vs, 0});
    ++roots;
    edges += 2;
  }
  if (pool.empty()) throw Error("gen_random could not build a diagram");

  std::vector<NodeId> tops;
  for (const auto& e : pool)
    if (e.parents == 0) tops.push_back(e.id);
  const NodeId source = tops.size() == 1 ? tops.front() : out.disjunction(std::move(tops));
  return std::move(out).build(source);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Nfbdd parse_any(std::string_view text) {
  for (const auto& line : tokenize(text))
    if (line.tokens[0] == "p") {
      if (line.tokens.size() > 1 && line.tokens[1] == "dnf") return dnf_to_nfbdd(parse_dnf(text));
      return parse_nfbdd(text);
    }
  return parse_nfbdd(text);
}

}  // namespace nfbdd
