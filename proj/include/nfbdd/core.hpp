#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nfbdd/assignment.hpp"
#include "nfbdd/errors.hpp"
#include "nfbdd/varset.hpp"

namespace nfbdd {

/// Handle into the node table of one diagram.
struct NodeId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

enum class NodeKind : std::uint8_t { Sink0, Sink1, Decision, Or };

/// A node of a non-deterministic free BDD. Decision nodes store {hi, lo} in
/// `children`; Or nodes store their ordered child sequence.
struct Node {
  NodeKind kind = NodeKind::Sink0;
  std::uint32_t var = 0;  // 1-based, Decision only
  std::vector<NodeId> children;

  static Node sink0() { return {NodeKind::Sink0, 0, {}}; }
  static Node sink1() { return {NodeKind::Sink1, 0, {}}; }
  static Node decision(std::uint32_t var, NodeId hi, NodeId lo) { return {NodeKind::Decision, var, {hi, lo}}; }
  static Node disjunction(std::vector<NodeId> children) { return {NodeKind::Or, 0, std::move(children)}; }

  bool is_sink() const { return kind == NodeKind::Sink0 || kind == NodeKind::Sink1; }
  NodeId hi() const { return children[0]; }
  NodeId lo() const { return children[1]; }
  NodeId child_for(bool bit) const { return bit ? children[0] : children[1]; }

  friend bool operator==(const Node&, const Node&) = default;
};

/// Unchecked node table. May describe an ill-formed diagram; see validate().
struct Diagram {
  std::size_t n_vars = 0;
  std::vector<Node> nodes;
  NodeId source;
};

struct Violation {
  enum class Kind {
    DanglingChild,
    BadSource,
    Cycle,
    MultipleSources,
    DuplicateSink,
    RepeatedVariable,
    EmptyOr,
    BadArity,
    VariableOutOfRange,
  };
  Kind kind;
  std::optional<NodeId> node;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

/// Lists every violated structural invariant. Empty iff the diagram is a
/// well-formed nFBDD.
ValidationReport validate(const Diagram& d);

class InvalidDiagram : public Error {
 public:
  explicit InvalidDiagram(ValidationReport report)
      : Error("invalid nFBDD: " + report.to_string()), report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// A validated, immutable nFBDD with cached variable sets and a bottom-up order.
class Nfbdd {
 public:
  /// Throws InvalidDiagram if `d` fails validation.
  explicit Nfbdd(Diagram d);

  std::size_t n_vars() const { return d_.n_vars; }
  NodeId source() const { return d_.source; }
  std::size_t node_count() const { return d_.nodes.size(); }
  /// Number of edges.
  std::size_t size() const { return size_; }

  const Node& node(NodeId q) const { return d_.nodes[q.value]; }
  bool contains(NodeId q) const { return q.value < d_.nodes.size(); }
  const VarSet& vars(NodeId q) const { return vars_[q.value]; }

  /// Children before parents; the source is last.
  std::span<const NodeId> bottom_up() const { return order_; }

  std::optional<NodeId> sink0() const { return sink0_; }
  std::optional<NodeId> sink1() const { return sink1_; }

  const Diagram& diagram() const { return d_; }

 private:
  Diagram d_;
  std::size_t size_ = 0;
  std::vector<VarSet> vars_;
  std::vector<NodeId> order_;
  std::optional<NodeId> sink0_;
  std::optional<NodeId> sink1_;
};

inline ValidationReport validate(const Nfbdd& b) { return validate(b.diagram()); }

/// Append-only node table used by every construction pass.
/// Sinks are created once and shared.
class DiagramBuilder {
 public:
  explicit DiagramBuilder(std::size_t n_vars) : n_vars_(n_vars) {}

  NodeId sink0();
  NodeId sink1();
  NodeId decision(std::uint32_t var, NodeId hi, NodeId lo) { return add(Node::decision(var, hi, lo)); }
  NodeId disjunction(std::vector<NodeId> children) { return add(Node::disjunction(std::move(children))); }
  NodeId add(Node n);

  const Node& node(NodeId q) const { return nodes_[q.value]; }
  std::size_t n_vars() const { return n_vars_; }

  /// Keeps only the nodes reachable from `source`, renumbered children-first
  /// in depth-first order, and validates.
  Nfbdd build(NodeId source) &&;

 private:
  std::size_t n_vars_;
  std::vector<Node> nodes_;
  std::optional<NodeId> sink0_, sink1_;
};

/// Model checker with reusable scratch space. Not thread-safe; use one per worker.
class Evaluator {
 public:
  explicit Evaluator(const Nfbdd& b);

  /// Evaluates node `q` on the value words `bits` (bit i-1 = variable i).
  /// Unbound variables of the caller's assignment must read as anything; only
  /// var(q) is consulted.
  bool eval(NodeId q, const std::uint64_t* bits);

 private:
  bool visit(NodeId q, const std::uint64_t* bits);

  const Nfbdd* b_;
  std::uint32_t stamp_ = 0;
  std::vector<std::uint32_t> seen_;
  std::vector<std::uint8_t> value_;
};

/// var(q): variables labelling decision nodes reachable from q.
const VarSet& vars(const Nfbdd& b, NodeId q);

/// 1 iff alpha restricted to var(q) is a model of q. Throws if alpha misses a
/// variable of var(q).
bool evaluate(const Nfbdd& b, NodeId q, const Assignment& alpha);

inline constexpr std::size_t kDefaultBruteForceCap = 24;

/// |B^{-1}(1)| over all 2^n total assignments by exhaustive evaluation.
std::uint64_t count_exact(const Nfbdd& b, std::size_t cap = kDefaultBruteForceCap);

/// |mod(q)|, assignments over var(q).
std::uint64_t count_models(const Nfbdd& b, NodeId q, std::size_t cap = kDefaultBruteForceCap);

/// mod(q) as assignments over var(q), in increasing order of their packed bits.
std::vector<Assignment> enumerate_models(const Nfbdd& b, NodeId q, std::size_t cap = kDefaultBruteForceCap);

// Structural predicates for the normal form.
bool is_zero_reduced(const Nfbdd& b);
/// No Or node has an Or node or a sink as a child.
bool is_or_flattened(const Nfbdd& b);
bool is_one_complete(const Nfbdd& b);
/// Source is an Or node (or, when n = 0, the 1-sink); Or children are
/// decisions; decision children are Or nodes or sinks.
bool is_alternating(const Nfbdd& b);

struct LayerIndex {
  /// layers[i] = L_i, i in [0, 2n].
  std::vector<std::vector<NodeId>> layers;
  /// Layer of each node, indexed by NodeId.
  std::vector<std::uint32_t> layer_of;
};

/// Layering of a 1-complete, 0-reduced, alternating diagram. Throws NotNormalForm otherwise.
LayerIndex layers(const Nfbdd& b);

/// Isomorphism check on the parts reachable from the sources, respecting
/// child order and decision variables.
bool structurally_equal(const Nfbdd& a, const Nfbdd& b);

}  // namespace nfbdd

template <>
struct std::hash<nfbdd::NodeId> {
  std::size_t operator()(nfbdd::NodeId q) const noexcept { return std::hash<std::uint32_t>{}(q.value); }
};
