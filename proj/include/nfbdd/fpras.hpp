#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "nfbdd/core.hpp"
#include "nfbdd/rng.hpp"
#include "nfbdd/transform.hpp"

namespace nfbdd {

/// A probability in (0, 1] extended with infinity, with 1/inf = 0, 1/0 = inf
/// and min(t, inf) = t.
class ExtProb {
 public:
  constexpr ExtProb() = default;
  constexpr explicit ExtProb(double v) : v_(v) {}
  static constexpr ExtProb infinity() { return ExtProb(std::numeric_limits<double>::infinity()); }
  /// 1/x, with 1/0 = inf.
  static constexpr ExtProb inverse_of(double x) { return x == 0.0 ? infinity() : ExtProb(1.0 / x); }

  constexpr double value() const { return v_; }
  constexpr bool is_infinite() const { return v_ == std::numeric_limits<double>::infinity(); }
  /// 1/p, with 1/inf = 0.
  constexpr double reciprocal() const { return is_infinite() ? 0.0 : 1.0 / v_; }

  friend constexpr ExtProb min(ExtProb a, ExtProb b) { return a.v_ <= b.v_ ? a : b; }
  friend constexpr auto operator<=>(ExtProb, ExtProb) = default;

 private:
  double v_ = 1.0;
};

struct FprasParams {
  static constexpr std::uint64_t kNoTheta = std::numeric_limits<std::uint64_t>::max();

  double epsilon = 0;
  double delta = 0;
  double kappa = 0;
  std::uint64_t n_s = 1;
  std::uint64_t n_t = 1;
  /// Sample-set size that interrupts a core run; kNoTheta disables the check.
  std::uint64_t theta = kNoTheta;
  std::uint64_t m = 1;
  std::uint64_t seed = 0;

  std::uint64_t copies() const { return n_s * n_t; }
  friend bool operator==(const FprasParams&, const FprasParams&) = default;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Ceiling that treats values within 1e-9 (relative) of an integer as that
/// integer, so exact products such as 16 * 64 * 41 * 1.5 * 10 survive rounding.
std::uint64_t ceil_count(double x);

/// kappa = eps/(1+eps), n_s = ceil(4n/kappa^2), n_t = ceil(8 ln(16|B|)),
/// theta = ceil(16 n_s n_t (1+kappa) |B|), m = ceil(8 ln(1/delta)); each at least 1.
FprasParams params_from(double epsilon, double delta, std::size_t n, std::size_t size, std::uint64_t seed = 0);

/// Lower median: element at index floor((k-1)/2) of the sorted values.
double lower_median(std::vector<double> values);

/// Keeps each element independently with probability p.
std::vector<Assignment> reduce_set(std::span<const Assignment> set, double p, SplitMix64& rng);

/// Keeps alpha from sets[i] iff i is the first child of the Or node q of which
/// alpha is a model.
std::vector<Assignment> union_first_model(const Nfbdd& b, NodeId q, std::span<const std::vector<Assignment>> sets);

/// Sample sets S^1(q) ... S^N(q) of one node, stored back to back. Every
/// assignment of a node binds exactly var(q), so only value words are kept.
class SampleStore {
 public:
  SampleStore() = default;
  SampleStore(std::size_t copies, std::size_t words) : words_(words) {
    offsets_.reserve(copies + 1);
  }

  std::size_t copies() const { return offsets_.size() - 1; }
  std::size_t words() const { return words_; }
  std::size_t size(std::size_t r) const { return offsets_[r + 1] - offsets_[r]; }
  std::size_t total() const { return offsets_.back(); }
  const std::uint64_t* sample(std::size_t r, std::size_t i) const { return data_.data() + (offsets_[r] + i) * words_; }
  Assignment assignment(std::size_t r, std::size_t i, const VarSet& vars) const;

  // Copies are filled in order: push() any number of samples, then close_copy().
  std::uint64_t* push() {
    data_.resize(data_.size() + words_, 0);
    return data_.data() + data_.size() - words_;
  }
  void push(const std::uint64_t* w) { std::copy(w, w + words_, push()); }
  void close_copy() { offsets_.push_back(data_.size() / words_); }

  /// Keeps sample i of copy r iff keep(r, i); preserves order.
  template <class Keep>
  void filter(Keep&& keep) {
    std::size_t out = 0;
    std::size_t begin = 0;
    for (std::size_t r = 0; r + 1 < offsets_.size(); ++r) {
      const std::size_t end = offsets_[r + 1];
      for (std::size_t i = begin; i < end; ++i)
        if (keep(r, i - begin)) {
          if (out != i) std::copy_n(data_.begin() + i * words_, words_, data_.begin() + out * words_);
          ++out;
        }
      begin = end;
      offsets_[r + 1] = out;
    }
    data_.resize(out * words_);
  }

 private:
  std::size_t words_ = 1;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint64_t> data_;
};

/// Per-node p(q) and sample sets; only present on a CoreOutcome when the run
/// retained them.
struct SamplerState {
  std::vector<ExtProb> p;
  std::vector<std::optional<SampleStore>> samples;
  /// Pre-thinning union sets of Or nodes.
  std::vector<std::optional<SampleStore>> hat;
};

struct NodeEvent {
  NodeId node;
  NodeKind kind;
  std::uint32_t layer;
  ExtProb p;
  ExtProb rho;       // Or nodes
  ExtProb rho_hat;   // Or nodes
  std::span<const double> means;  // M_0 .. M_{n_t - 1}, Or nodes
  const SampleStore* samples;
  const SampleStore* hat;  // Or nodes
  std::uint64_t run;
};

/// Receives one event per processed node. Called from the thread running the
/// core, so an observer shared by parallel runs must synchronize itself.
class SamplerObserver {
 public:
  virtual ~SamplerObserver() = default;
  virtual void on_node(const NodeEvent& event) = 0;
  virtual void on_interrupt(NodeId /*node*/, std::size_t /*copy*/, std::size_t /*size*/) {}
};

struct CoreOptions {
  bool retain_samples = false;  // keep S^r(q) of every node in the outcome
  bool retain_hat = false;      // also keep the union sets of Or nodes
  SamplerObserver* observer = nullptr;
};

struct CoreOutcome {
  double estimate = 0;
  bool interrupted = false;
  ExtProb p_source = ExtProb::infinity();
  std::optional<NodeId> interrupt_node;
  std::vector<std::size_t> max_sample_size;  // per node
  std::optional<SamplerState> state;
};

/// One run of the bottom-up estimator over the layers of a normalized
/// diagram. `run` selects the random substream.
CoreOutcome core_run(const Normalized& b, const FprasParams& params, std::uint64_t run, const CoreOptions& options = {});

struct RunOutcome {
  double estimate = 0;
  bool interrupted = false;
  double millis = 0;
};

struct CountReport {
  enum class Method { Fpras, ConstantFalse, NoVariables, Exact };

  Method method = Method::Fpras;
  double estimate = 0;
  std::optional<std::uint64_t> exact;
  double epsilon = 0;
  double delta = 0;
  std::uint64_t seed = 0;
  std::size_t n_vars = 0;
  std::size_t input_size = 0;
  std::optional<std::size_t> normalized_size;
  std::optional<FprasParams> params;
  std::vector<RunOutcome> runs;
  std::size_t interrupted_runs = 0;
  double wall_millis = 0;
};

struct CountOptions {
  unsigned threads = 1;  // 0 = one per hardware thread
  bool no_theta = false;
  /// Return the brute-force count when n <= this (and skip sampling). Negative disables.
  int exact_threshold = -1;
  SamplerObserver* observer = nullptr;  // sees the events of every run
};

/// Normalizes, then returns the lower median of m independent core runs.
/// Throws InvalidParameter unless epsilon > 0 and 0 < delta < 1.
CountReport approx_count(const Nfbdd& b, double epsilon, double delta, std::uint64_t seed,
                         const CountOptions& options = {});

/// approx_count on an already normalized diagram.
CountReport approx_count(const NormalForm& nf, std::size_t input_size, double epsilon, double delta,
                         std::uint64_t seed, const CountOptions& options = {});

}  // namespace nfbdd
