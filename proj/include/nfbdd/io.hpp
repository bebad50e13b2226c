#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nfbdd/core.hpp"

namespace nfbdd {

/*
 * nFBDD text format (line oriented, whitespace separated):
 *
 *   c <comment>
 *   p nfbdd <n_vars> <n_nodes>
 *   <id> F                          0-sink
 *   <id> T                          1-sink
 *   <id> d <var> <hi_id> <lo_id>    ite(x_var, hi, lo)
 *   <id> o <k> <child_1> ... <child_k>
 *   s <source_id>
 *
 * Ids are positive and unique; children may be referenced before they are
 * declared. The order of Or children is semantic: it fixes which child a
 * shared model is credited to.
 */
Nfbdd parse_nfbdd(std::string_view text);

/// Writes the format above, children before parents, ids 1..N.
std::string serialize_nfbdd(const Nfbdd& b);

/// DIMACS-style DNF: `p dnf <n_vars> <n_terms>`, then one term per line as
/// signed literals terminated by 0.
struct DnfFormula {
  std::size_t n_vars = 0;
  std::vector<std::vector<int>> terms;
};

DnfFormula parse_dnf(std::string_view text);

/// Or over one decision chain per term, variables tested in ascending order.
/// A formula without terms yields the lone 0-sink diagram.
Nfbdd dnf_to_nfbdd(const DnfFormula& f);

/// Truth value of the DNF on a total assignment packed in `bits` (bit i-1 = x_i).
bool dnf_satisfied(const DnfFormula& f, std::uint64_t bits);

/// Random free diagram over n variables with roughly `target_edges` edges
/// (within a factor 2). Deterministic in the seed.
Nfbdd gen_random(std::size_t n, std::size_t target_edges, std::uint64_t seed);

/// File helpers; the format is chosen by content (`p dnf` vs `p nfbdd`).
std::string read_file(const std::string& path);
Nfbdd parse_any(std::string_view text);

}  // namespace nfbdd
