#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace nfbdd {

/// Fixed-width bit vector over variables 1..n. Bit i-1 stands for variable i.
/// Used both for variable sets and for the value part of assignments.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t n_vars) : n_vars_(n_vars), words_(word_count(n_vars), 0) {}

  static std::size_t word_count(std::size_t n_vars) { return (n_vars + 63) / 64; }

  std::size_t n_vars() const { return n_vars_; }
  std::size_t words() const { return words_.size(); }

  bool test(std::uint32_t var) const {
    const std::uint32_t i = var - 1;
    return (words_[i >> 6] >> (i & 63)) & 1U;
  }
  void set(std::uint32_t var, bool value = true) {
    const std::uint32_t i = var - 1;
    const std::uint64_t bit = std::uint64_t{1} << (i & 63);
    if (value)
      words_[i >> 6] |= bit;
    else
      words_[i >> 6] &= ~bit;
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool empty() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

  BitVec& operator|=(const BitVec& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  BitVec& operator&=(const BitVec& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  /// this \ o
  BitVec minus(const BitVec& o) const {
    BitVec r = *this;
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] &= ~o.words_[i];
    return r;
  }
  bool subset_of(const BitVec& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }

  /// Variables in ascending order.
  std::vector<std::uint32_t> members() const {
    std::vector<std::uint32_t> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        const int b = std::countr_zero(bits);
        out.push_back(static_cast<std::uint32_t>(w * 64 + b + 1));
        bits &= bits - 1;
      }
    }
    return out;
  }

  std::span<const std::uint64_t> data() const { return words_; }
  std::span<std::uint64_t> data() { return words_; }

  friend bool operator==(const BitVec& a, const BitVec& b) = default;
  friend auto operator<=>(const BitVec& a, const BitVec& b) = default;

 private:
  std::size_t n_vars_ = 0;
  std::vector<std::uint64_t> words_;
};

using VarSet = BitVec;

}  // namespace nfbdd
