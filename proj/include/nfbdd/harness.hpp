#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "nfbdd/fpras.hpp"

namespace nfbdd::harness {

struct Instance {
  std::string name;
  Nfbdd diagram;
};

/// Generated instances with n in [n_min, n_max], 0 < count < 2^n and a
/// normalized size of at most `max_normalized_size` edges. Deterministic.
std::vector<Instance> generated_corpus(std::size_t count, std::size_t n_min, std::size_t n_max,
                                       std::size_t max_normalized_size, std::uint64_t seed);

/// Random DNFs compiled to diagrams, same filters as generated_corpus.
std::vector<Instance> dnf_corpus(std::size_t count, std::size_t n_min, std::size_t n_max,
                                 std::size_t max_normalized_size, std::uint64_t seed);

/// Retention statistics of reduce_set on a fixed set of `elements` assignments.
struct ReduceCheck {
  double p = 0;
  std::size_t trials = 0;
  std::vector<double> frequency;
  double sigma = 0;              // binomial sd of one frequency
  double max_frequency_dev = 0;  // in units of sigma
  double covariance_sigma = 0;
  double max_covariance_dev = 0;  // in units of covariance_sigma
  bool passed = false;
};
ReduceCheck check_reduce_distribution(std::size_t trials, double p, std::uint64_t seed, std::size_t elements = 8);

/// union_first_model against the first-model rule computed from enumerated
/// model sets, over every Or node of every (normalized) instance.
struct UnionCheck {
  std::size_t or_nodes = 0;
  std::size_t cases = 0;
  std::size_t mismatches = 0;
  bool passed = false;
};
UnionCheck check_union_oracle(const std::vector<Nfbdd>& normalized, std::uint64_t seed);

/// |I(alpha, q, l)| * |mod(q_l)| <= |mod(q)| for all nodes, models and positions.
struct DivergenceBoundCheck {
  std::size_t instances = 0;
  std::size_t checks = 0;
  std::size_t violations = 0;
  std::size_t partition_errors = 0;
  double max_ratio = 0;  // largest |I| * |mod(q_l)| / |mod(q)|
  bool passed = false;
};
DivergenceBoundCheck check_divergence_bound(const std::vector<Nfbdd>& normalized, std::size_t cap = 12);

/// For every run, node, copy and sample: the sample is a model of the node
/// and each restriction along its derivation path sits in the matching set.
struct PathConsistencyCheck {
  std::size_t runs = 0;
  std::size_t samples = 0;
  std::size_t memberships = 0;
  std::size_t unsound = 0;
  std::size_t violations = 0;
  std::size_t interrupted = 0;
  bool passed = false;
};
PathConsistencyCheck check_path_consistency(const Normalized& nf, const FprasParams& params, std::size_t runs);

/// Mean of |S_hat^r(q)| / rho over `copies` copies against |mod(q)|.
struct UnbiasedCheck {
  NodeId node;
  std::uint64_t exact = 0;
  double mean = 0;
  double rho = 0;
  double relative_error = 0;
  double tolerance = 0.05;
  bool passed = false;
};
UnbiasedCheck check_unbiased_or(const Normalized& nf, NodeId node, std::size_t copies, std::uint64_t seed,
                                double tolerance = 0.05);

struct InstanceCalibration {
  std::string name;
  std::size_t n_vars = 0;
  std::size_t normalized_size = 0;
  std::uint64_t exact = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0;
  double mean_relative_error = 0;
  std::size_t core_runs = 0;
  std::size_t interrupted_runs = 0;
  double interrupt_rate = 0;
  bool passed = false;
};

struct GuaranteeCheck {
  double epsilon = 0;
  double delta = 0;
  std::size_t trials = 0;
  double threshold = 0;
  bool no_theta = false;
  std::vector<InstanceCalibration> instances;
  bool passed = false;
};

struct GuaranteeOptions {
  double threshold = 0.65;  // minimum per-instance success rate
  unsigned threads = 1;
  bool no_theta = false;
  std::size_t cap = kDefaultBruteForceCap;
};

/// `trials` seeded approx_count calls per instance against the brute-force count.
GuaranteeCheck check_guarantee(const std::vector<Instance>& corpus, double epsilon, double delta, std::size_t trials,
                               std::uint64_t seed, const GuaranteeOptions& options = {});

/// Fraction of interrupted core runs under the derived parameters, with
/// `core_runs` runs spread round-robin over the corpus.
struct InterruptCheck {
  std::size_t core_runs = 0;
  std::size_t interrupted = 0;
  double rate = 0;
  double ceiling = 0.20;
  bool passed = false;
};
InterruptCheck check_interrupt_rate(const std::vector<Instance>& corpus, double epsilon, double delta,
                                    std::size_t core_runs, std::uint64_t seed, unsigned threads = 1,
                                    double ceiling = 0.20);

nlohmann::json to_json(const ReduceCheck& r);
nlohmann::json to_json(const UnionCheck& r);
nlohmann::json to_json(const DivergenceBoundCheck& r);
nlohmann::json to_json(const PathConsistencyCheck& r);
nlohmann::json to_json(const UnbiasedCheck& r);
nlohmann::json to_json(const GuaranteeCheck& r);
nlohmann::json to_json(const InterruptCheck& r);

}  // namespace nfbdd::harness
