#pragma once

#include <variant>

#include "nfbdd/core.hpp"

namespace nfbdd {

/// The function with no models. 0-reduced diagrams cannot express it.
struct ConstantFalse {
  friend bool operator==(ConstantFalse, ConstantFalse) = default;
};

/// A 1-complete, 0-reduced, alternating diagram with its layering.
struct Normalized {
  Nfbdd diagram;
  LayerIndex layers;
};

using NormalForm = std::variant<Normalized, ConstantFalse>;
using MaybeFalse = std::variant<Nfbdd, ConstantFalse>;

/// Removes ite(x, 0, 0) nodes and 0-sink children of Or nodes until a fixed
/// point; Or nodes left without children collapse to the 0-sink.
MaybeFalse zero_reduce(const Nfbdd& b);

/// Requires a 0-reduced input. Or nodes with a 1-sink child become the 1-sink,
/// then Or children of Or nodes are spliced in place into their parents.
Nfbdd flatten_or(const Nfbdd& b);

/// Requires 0-reduced and flattened. Pads every child c of q with chains
/// ite(x, c, c) until var(c) = var(q) minus q's own variable; the source is
/// padded to all n variables. Chains add missing variables innermost-first
/// in ascending index order and are shared per (node, missing set).
Nfbdd one_complete(const Nfbdd& b);

/// Requires 0-reduced, flattened and 1-complete. Wraps decision children of
/// decision nodes, and a non-Or source, in singleton Or nodes.
Nfbdd alternate(const Nfbdd& b);

/// zero_reduce -> flatten_or -> one_complete -> alternate, checking each
/// stage's postcondition.
NormalForm normalize(const Nfbdd& b);

}  // namespace nfbdd
