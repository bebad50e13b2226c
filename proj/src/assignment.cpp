#include "nfbdd/assignment.hpp"

#include <stdexcept>

namespace nfbdd {

Assignment Assignment::from_bits(std::size_t n_vars, std::uint64_t bits) {
  Assignment a(n_vars);
  for (std::uint32_t v = 1; v <= n_vars; ++v) a.bind(v, (bits >> (v - 1)) & 1U);
  return a;
}

Assignment Assignment::over(const VarSet& vars, std::uint64_t bits) {
  Assignment a(vars.n_vars());
  unsigned i = 0;
  for (auto v : vars.members()) a.bind(v, (bits >> i++) & 1U);
  return a;
}

void Assignment::bind(std::uint32_t var, bool bit) {
  if (var == 0 || var > n_vars()) throw std::invalid_argument("variable out of range: " + std::to_string(var));
  if (mask_.test(var)) throw std::invalid_argument("variable bound twice: x" + std::to_string(var));
  mask_.set(var);
  values_.set(var, bit);
}

Assignment Assignment::combined(const Assignment& other) const {
  Assignment a = *this;
  for (auto v : other.vars().members()) a.bind(v, other.value(v));
  return a;
}

Assignment Assignment::restricted(const VarSet& vars) const {
  Assignment a = *this;
  a.mask_ &= vars;
  a.values_ &= vars;
  return a;
}

std::string Assignment::to_string() const {
  std::string s = "{";
  bool first = true;
  for (auto v : mask_.members()) {
    if (!first) s += ", ";
    first = false;
    s += "x" + std::to_string(v) + "=" + (values_.test(v) ? "1" : "0");
  }
  return s + "}";
}

}  // namespace nfbdd
