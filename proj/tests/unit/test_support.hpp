#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "nfbdd/core.hpp"
#include "nfbdd/io.hpp"

namespace support {

using nfbdd::Nfbdd;
using nfbdd::NodeId;

Nfbdd parse(std::string_view text);

// Oracles. None of these go through Evaluator or the library's counters.

/// Explicit search for a path from q to the 1-sink consistent with `bits`.
bool path_exists(const Nfbdd& b, NodeId q, std::uint64_t bits);
/// Number of total assignments over 1..n with an accepting path.
std::uint64_t path_count(const Nfbdd& b);
/// Count of the models of q as assignments over the variables reachable from q,
/// where reachability is recomputed by a plain DFS.
std::uint64_t path_count(const Nfbdd& b, NodeId q);
/// True iff no source-to-sink path reads a variable twice (full path enumeration).
bool all_paths_free(const nfbdd::Diagram& d);
/// Every source-to-1-sink path reads exactly the variables 1..n.
bool accepting_paths_read_all(const Nfbdd& b);

bool dnf_truth(const nfbdd::DnfFormula& f, std::uint64_t bits);
std::uint64_t dnf_truth_count(const nfbdd::DnfFormula& f);

// Instance sources.
nfbdd::DnfFormula random_dnf(std::size_t n, std::uint64_t seed);
/// Random acyclic single-source node table; decisions may repeat variables,
/// so the result is not necessarily free.
nfbdd::Diagram random_raw_diagram(std::size_t n, std::size_t nodes, std::uint64_t seed);
std::vector<Nfbdd> generated(std::size_t count, std::size_t n_min, std::size_t n_max, std::uint64_t seed);

}  // namespace support
