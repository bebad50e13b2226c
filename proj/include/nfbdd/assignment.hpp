#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nfbdd/varset.hpp"

namespace nfbdd {

/// Partial assignment: a value vector paired with the mask of bound variables.
/// Bits of `values` outside `mask` are always zero.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t n_vars) : values_(n_vars), mask_(n_vars) {}

  /// Total assignment over 1..n_vars from the low bits of `bits` (bit i-1 = variable i).
  static Assignment from_bits(std::size_t n_vars, std::uint64_t bits);
  /// Assignment binding exactly `vars`, values taken from the low bits of `bits`
  /// in ascending variable order.
  static Assignment over(const VarSet& vars, std::uint64_t bits);

  std::size_t n_vars() const { return mask_.n_vars(); }

  bool binds(std::uint32_t var) const { return mask_.test(var); }
  std::optional<bool> get(std::uint32_t var) const {
    if (!mask_.test(var)) return std::nullopt;
    return values_.test(var);
  }
  bool value(std::uint32_t var) const { return values_.test(var); }

  /// Binds `var`; throws std::invalid_argument if it is already bound.
  void bind(std::uint32_t var, bool bit);
  void unbind(std::uint32_t var) {
    mask_.set(var, false);
    values_.set(var, false);
  }

  /// alpha (x) {x -> bit}
  Assignment extended(std::uint32_t var, bool bit) const {
    Assignment a = *this;
    a.bind(var, bit);
    return a;
  }
  /// Union of two assignments over disjoint variable sets.
  Assignment combined(const Assignment& other) const;
  Assignment restricted(const VarSet& vars) const;

  const VarSet& vars() const { return mask_; }
  const BitVec& values() const { return values_; }

  std::string to_string() const;

  friend bool operator==(const Assignment&, const Assignment&) = default;
  friend auto operator<=>(const Assignment&, const Assignment&) = default;

 private:
  BitVec values_;
  BitVec mask_;
};

}  // namespace nfbdd
