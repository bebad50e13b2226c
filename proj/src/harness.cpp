#include "nfbdd/harness.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "nfbdd/io.hpp"
#include "nfbdd/parallel.hpp"
#include "nfbdd/paths.hpp"
#include "nfbdd/report.hpp"

namespace nfbdd::harness {

namespace {

/// Path-existence model check without memoization; independent of Evaluator.
bool accepts(const Nfbdd& b, NodeId q, const Assignment& alpha) {
  const Node& node = b.node(q);
  switch (node.kind) {
    case NodeKind::Sink0:
      return false;
    case NodeKind::Sink1:
      return true;
    case NodeKind::Decision:
      return accepts(b, node.child_for(alpha.value(node.var)), alpha);
    case NodeKind::Or:
      return std::any_of(node.children.begin(), node.children.end(),
                         [&](NodeId c) { return accepts(b, c, alpha); });
  }
  return false;
}

std::vector<Assignment> oracle_models(const Nfbdd& b, NodeId q) {
  const VarSet& vq = b.vars(q);
  const std::size_t k = vq.count();
  std::vector<Assignment> out;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << k); ++bits) {
    Assignment a = Assignment::over(vq, bits);
    if (accepts(b, q, a)) out.push_back(std::move(a));
  }
  return out;
}

bool within_filters(const Nfbdd& b, std::size_t max_size, std::uint64_t& exact) {
  const NormalForm nf = normalize(b);
  if (!std::holds_alternative<Normalized>(nf)) return false;
  if (std::get<Normalized>(nf).diagram.size() > max_size) return false;
  exact = count_exact(b);
  return exact > 0 && exact < (std::uint64_t{1} << b.n_vars());
}

struct KeyHash {
  std::size_t operator()(const std::vector<std::uint64_t>& k) const noexcept {
    std::uint64_t h = 0x12345678;
    for (auto w : k) h = SplitMix64::mix(h ^ w);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

std::vector<Instance> generated_corpus(std::size_t count, std::size_t n_min, std::size_t n_max,
                                       std::size_t max_normalized_size, std::uint64_t seed) {
  std::vector<Instance> out;
  for (std::uint64_t attempt = 0; out.size() < count; ++attempt) {
    if (attempt > 100000) throw Error("could not assemble the generated corpus under the given filters");
    const std::size_t n = n_min + out.size() % (n_max - n_min + 1);
    SplitMix64 rng(derive_seed(seed, {attempt}));
    const std::size_t target = 6 + rng() % 14;
    Nfbdd b = gen_random(n, target, derive_seed(seed, {attempt, 1}));
    std::uint64_t exact = 0;
    if (!within_filters(b, max_normalized_size, exact)) continue;
    out.push_back({"gen-n" + std::to_string(n) + "-a" + std::to_string(attempt), std::move(b)});
  }
  return out;
}

std::vector<Instance> dnf_corpus(std::size_t count, std::size_t n_min, std::size_t n_max,
                                 std::size_t max_normalized_size, std::uint64_t seed) {
  std::vector<Instance> out;
  for (std::uint64_t attempt = 0; out.size() < count; ++attempt) {
    if (attempt > 100000) throw Error("could not assemble the DNF corpus under the given filters");
    const std::size_t n = n_min + out.size() % (n_max - n_min + 1);
    SplitMix64 rng(derive_seed(seed, {attempt, 7}));
    DnfFormula f;
    f.n_vars = n;
    const std::size_t terms = 2 + rng() % 3;
    for (std::size_t t = 0; t < terms; ++t) {
      const std::size_t len = 1 + rng() % std::min<std::size_t>(3, n);
      std::vector<int> term;
      while (term.size() < len) {
        const int v = static_cast<int>(1 + rng() % n);
        if (std::none_of(term.begin(), term.end(), [&](int l) { return std::abs(l) == v; }))
          term.push_back(rng() % 2 ? v : -v);
      }
      f.terms.push_back(std::move(term));
    }
    Nfbdd b = dnf_to_nfbdd(f);
    std::uint64_t exact = 0;
    if (!within_filters(b, max_normalized_size, exact)) continue;
    out.push_back({"dnf-n" + std::to_string(n) + "-a" + std::to_string(attempt), std::move(b)});
  }
  return out;
}

ReduceCheck check_reduce_distribution(std::size_t trials, double p, std::uint64_t seed, std::size_t elements) {
  ReduceCheck rep;
  rep.p = p;
  rep.trials = trials;
  std::vector<Assignment> set;
  for (std::uint64_t i = 0; i < elements; ++i) set.push_back(Assignment::from_bits(8, i));

  std::vector<std::size_t> hits(elements, 0);
  std::vector<std::size_t> pair_hits(elements * elements, 0);
  std::vector<std::uint8_t> present(elements);
  for (std::size_t t = 0; t < trials; ++t) {
    SplitMix64 rng(derive_seed(seed, {t}));
    std::fill(present.begin(), present.end(), 0);
    for (const auto& a : reduce_set(set, p, rng)) present[a.values().data()[0]] = 1;
    for (std::size_t i = 0; i < elements; ++i) {
      if (!present[i]) continue;
      ++hits[i];
      for (std::size_t j = i + 1; j < elements; ++j) pair_hits[i * elements + j] += present[j];
    }
  }
  const double T = static_cast<double>(trials);
  rep.sigma = std::sqrt(p * (1 - p) / T);
  rep.covariance_sigma = p * (1 - p) / std::sqrt(T);
  bool ok = true;
  for (std::size_t i = 0; i < elements; ++i) {
    const double f = static_cast<double>(hits[i]) / T;
    rep.frequency.push_back(f);
    if (rep.sigma == 0) {
      ok = ok && f == p;
    } else {
      rep.max_frequency_dev = std::max(rep.max_frequency_dev, std::abs(f - p) / rep.sigma);
    }
  }
  for (std::size_t i = 0; i < elements; ++i)
    for (std::size_t j = i + 1; j < elements; ++j) {
      const double cov = static_cast<double>(pair_hits[i * elements + j]) / T - rep.frequency[i] * rep.frequency[j];
      if (rep.covariance_sigma == 0)
        ok = ok && std::abs(cov) < 1e-12;
      else
        rep.max_covariance_dev = std::max(rep.max_covariance_dev, std::abs(cov) / rep.covariance_sigma);
    }
  rep.passed = ok && rep.max_frequency_dev <= 4.0 && rep.max_covariance_dev <= 4.0;
  return rep;
}

UnionCheck check_union_oracle(const std::vector<Nfbdd>& normalized, std::uint64_t seed) {
  UnionCheck rep;
  for (std::size_t d = 0; d < normalized.size(); ++d) {
    const Nfbdd& b = normalized[d];
    for (NodeId q : b.bottom_up()) {
      const Node& node = b.node(q);
      if (node.kind != NodeKind::Or) continue;
      ++rep.or_nodes;
      std::vector<std::vector<Assignment>> mods;
      std::vector<std::set<Assignment>> mod_sets;
      std::size_t total = 0;
      for (NodeId c : node.children) {
        mods.push_back(oracle_models(b, c));
        mod_sets.emplace_back(mods.back().begin(), mods.back().end());
        total += mods.back().size();
      }
      const bool exhaustive = total <= 10;
      const std::uint64_t cases = exhaustive ? (std::uint64_t{1} << total) : 256;
      SplitMix64 rng(derive_seed(seed, {d, q.value}));
      for (std::uint64_t c = 0; c < cases; ++c) {
        const std::uint64_t pick = exhaustive ? c : rng();
        std::vector<std::vector<Assignment>> sets(mods.size());
        std::vector<Assignment> expected;
        std::size_t bit = 0;
        for (std::size_t i = 0; i < mods.size(); ++i)
          for (const auto& a : mods[i]) {
            const bool chosen = exhaustive ? ((pick >> bit) & 1U) : (rng() & 1U);
            ++bit;
            if (!chosen) continue;
            sets[i].push_back(a);
            bool first = true;
            for (std::size_t j = 0; j < i; ++j) first = first && !mod_sets[j].count(a);
            if (first) expected.push_back(a);
          }
        ++rep.cases;
        if (union_first_model(b, q, sets) != expected) ++rep.mismatches;
      }
    }
  }
  rep.passed = rep.mismatches == 0 && rep.cases > 0;
  return rep;
}

DivergenceBoundCheck check_divergence_bound(const std::vector<Nfbdd>& normalized, std::size_t cap) {
  DivergenceBoundCheck rep;
  for (const Nfbdd& b : normalized) {
    ++rep.instances;
    std::vector<std::uint64_t> mod_count(b.node_count(), 0);
    for (NodeId q : b.bottom_up()) mod_count[q.value] = oracle_models(b, q).size();
    for (NodeId q : b.bottom_up()) {
      if (b.vars(q).count() > cap) continue;
      const auto models = enumerate_models(b, q, cap);
      if (models.empty()) continue;
      std::vector<DerivationPath> paths;
      paths.reserve(models.size());
      for (const auto& a : models) paths.push_back(derivation_path(b, q, a));
      const double total = static_cast<double>(mod_count[q.value]);
      for (std::size_t a = 0; a < models.size(); ++a) {
        const auto& pa = paths[a];
        std::vector<std::size_t> classes(pa.vertices.size(), 0);
        for (std::size_t o = 0; o < models.size(); ++o) ++classes[lcpn_index(pa, paths[o])];
        std::size_t covered = 0;
        for (std::size_t l = 0; l < classes.size(); ++l) {
          covered += classes[l];
          ++rep.checks;
          const double lhs = static_cast<double>(classes[l]) * static_cast<double>(mod_count[pa.vertices[l].value]);
          rep.max_ratio = std::max(rep.max_ratio, lhs / total);
          if (lhs > total) ++rep.violations;
        }
        if (covered != models.size()) ++rep.partition_errors;
      }
    }
  }
  rep.passed = rep.violations == 0 && rep.partition_errors == 0 && rep.checks > 0;
  return rep;
}

PathConsistencyCheck check_path_consistency(const Normalized& nf, const FprasParams& params, std::size_t runs) {
  PathConsistencyCheck rep;
  const Nfbdd& b = nf.diagram;
  CoreOptions opts;
  opts.retain_samples = true;
  for (std::size_t run = 0; run < runs; ++run) {
    ++rep.runs;
    CoreOutcome out = core_run(nf, params, run, opts);
    if (out.interrupted) ++rep.interrupted;
    const SamplerState& st = *out.state;

    // Per node: (copy, value words) of every stored sample.
    std::vector<std::unordered_set<std::vector<std::uint64_t>, KeyHash>> members(b.node_count());
    for (NodeId q : b.bottom_up()) {
      if (!st.samples[q.value]) continue;
      const SampleStore& s = *st.samples[q.value];
      for (std::size_t r = 0; r < s.copies(); ++r)
        for (std::size_t i = 0; i < s.size(r); ++i) {
          std::vector<std::uint64_t> key{r};
          key.insert(key.end(), s.sample(r, i), s.sample(r, i) + s.words());
          members[q.value].insert(std::move(key));
        }
    }

    for (NodeId q : b.bottom_up()) {
      if (!st.samples[q.value]) continue;
      const SampleStore& s = *st.samples[q.value];
      for (std::size_t r = 0; r < s.copies(); ++r)
        for (std::size_t i = 0; i < s.size(r); ++i) {
          ++rep.samples;
          const Assignment alpha = s.assignment(r, i, b.vars(q));
          if (!accepts(b, q, alpha)) {
            ++rep.unsound;
            continue;
          }
          const DerivationPath path = derivation_path(b, q, alpha);
          for (std::size_t j = 0; j + 1 < path.vertices.size(); ++j) {
            const NodeId qj = path.vertices[j];
            const Assignment restricted = alpha.restricted(b.vars(qj));
            std::vector<std::uint64_t> key{r};
            const auto words = restricted.values().data();
            key.insert(key.end(), words.begin(), words.end());
            if (key.size() < 1 + s.words()) key.resize(1 + s.words(), 0);
            ++rep.memberships;
            if (!members[qj.value].count(key)) ++rep.violations;
          }
        }
    }
  }
  rep.passed = rep.unsound == 0 && rep.violations == 0 && rep.samples > 0;
  return rep;
}

namespace {

class HatProbe : public SamplerObserver {
 public:
  explicit HatProbe(NodeId target) : target_(target) {}
  void on_node(const NodeEvent& e) override {
    if (e.node != target_ || !e.hat) return;
    rho = e.rho.value();
    copies = e.hat->copies();
    for (std::size_t r = 0; r < copies; ++r) total += e.hat->size(r);
    seen = true;
  }
  NodeId target_;
  bool seen = false;
  double rho = 0;
  std::size_t copies = 0;
  std::uint64_t total = 0;
};

}  // namespace

UnbiasedCheck check_unbiased_or(const Normalized& nf, NodeId node, std::size_t copies, std::uint64_t seed,
                                double tolerance) {
  UnbiasedCheck rep;
  rep.node = node;
  rep.tolerance = tolerance;
  if (nf.diagram.node(node).kind != NodeKind::Or) throw Error("check_unbiased_or needs an Or node");
  rep.exact = oracle_models(nf.diagram, node).size();

  FprasParams params;
  params.n_s = copies;
  params.n_t = 1;
  params.theta = FprasParams::kNoTheta;
  params.seed = seed;
  HatProbe probe(node);
  CoreOptions opts;
  opts.retain_hat = true;
  opts.observer = &probe;
  core_run(nf, params, 0, opts);
  if (!probe.seen) throw Error("probe node was not processed");
  rep.rho = probe.rho;
  rep.mean = static_cast<double>(probe.total) / (static_cast<double>(probe.copies) * probe.rho);
  rep.relative_error = std::abs(rep.mean - static_cast<double>(rep.exact)) / static_cast<double>(rep.exact);
  rep.passed = rep.relative_error <= tolerance;
  return rep;
}

GuaranteeCheck check_guarantee(const std::vector<Instance>& corpus, double epsilon, double delta, std::size_t trials,
                               std::uint64_t seed, const GuaranteeOptions& options) {
  GuaranteeCheck rep;
  rep.epsilon = epsilon;
  rep.delta = delta;
  rep.trials = trials;
  rep.threshold = options.threshold;
  rep.no_theta = options.no_theta;
  rep.passed = true;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const Instance& inst = corpus[k];
    InstanceCalibration cal;
    cal.name = inst.name;
    cal.n_vars = inst.diagram.n_vars();
    cal.exact = count_exact(inst.diagram, options.cap);
    cal.trials = trials;
    const NormalForm nf = normalize(inst.diagram);
    if (const auto* norm = std::get_if<Normalized>(&nf)) cal.normalized_size = norm->diagram.size();

    std::vector<CountReport> reports(trials);
    CountOptions copts;
    copts.no_theta = options.no_theta;
    parallel_for(trials, options.threads, [&](unsigned, std::size_t t) {
      reports[t] = approx_count(nf, inst.diagram.size(), epsilon, delta, derive_seed(seed, {k, t}), copts);
    });
    const double exact = static_cast<double>(cal.exact);
    double err_sum = 0;
    for (const auto& r : reports) {
      const bool ok = r.estimate >= (1 - epsilon) * exact && r.estimate <= (1 + epsilon) * exact;
      cal.successes += ok;
      err_sum += exact > 0 ? std::abs(r.estimate - exact) / exact : std::abs(r.estimate);
      cal.core_runs += r.runs.size();
      cal.interrupted_runs += r.interrupted_runs;
    }
    cal.success_rate = trials ? static_cast<double>(cal.successes) / static_cast<double>(trials) : 0;
    cal.mean_relative_error = trials ? err_sum / static_cast<double>(trials) : 0;
    cal.interrupt_rate =
        cal.core_runs ? static_cast<double>(cal.interrupted_runs) / static_cast<double>(cal.core_runs) : 0;
    cal.passed = cal.success_rate >= options.threshold;
    rep.passed = rep.passed && cal.passed;
    rep.instances.push_back(std::move(cal));
  }
  return rep;
}

InterruptCheck check_interrupt_rate(const std::vector<Instance>& corpus, double epsilon, double delta,
                                    std::size_t core_runs, std::uint64_t seed, unsigned threads, double ceiling) {
  InterruptCheck rep;
  rep.core_runs = core_runs;
  rep.ceiling = ceiling;
  std::vector<Normalized> norms;
  std::vector<FprasParams> params;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    NormalForm nf = normalize(corpus[k].diagram);
    if (!std::holds_alternative<Normalized>(nf)) continue;
    auto& norm = std::get<Normalized>(nf);
    params.push_back(params_from(epsilon, delta, norm.diagram.n_vars(), norm.diagram.size(), derive_seed(seed, {k})));
    norms.push_back(std::move(norm));
  }
  if (norms.empty()) throw Error("no satisfiable instance in the corpus");
  std::vector<std::uint8_t> hit(core_runs, 0);
  parallel_for(core_runs, threads, [&](unsigned, std::size_t j) {
    const std::size_t k = j % norms.size();
    hit[j] = core_run(norms[k], params[k], j / norms.size()).interrupted;
  });
  for (auto h : hit) rep.interrupted += h;
  rep.rate = core_runs ? static_cast<double>(rep.interrupted) / static_cast<double>(core_runs) : 0;
  rep.passed = rep.rate <= ceiling;
  return rep;
}

nlohmann::json to_json(const ReduceCheck& r) {
  return {{"p", r.p},
          {"trials", r.trials},
          {"frequency", r.frequency},
          {"sigma", r.sigma},
          {"max_frequency_dev_sigmas", r.max_frequency_dev},
          {"covariance_sigma", r.covariance_sigma},
          {"max_covariance_dev_sigmas", r.max_covariance_dev},
          {"passed", r.passed}};
}

nlohmann::json to_json(const UnionCheck& r) {
  return {{"or_nodes", r.or_nodes}, {"cases", r.cases}, {"mismatches", r.mismatches}, {"passed", r.passed}};
}

nlohmann::json to_json(const DivergenceBoundCheck& r) {
  return {{"instances", r.instances},   {"checks", r.checks},       {"violations", r.violations},
          {"partition_errors", r.partition_errors}, {"max_ratio", r.max_ratio}, {"passed", r.passed}};
}

nlohmann::json to_json(const PathConsistencyCheck& r) {
  return {{"runs", r.runs},         {"samples", r.samples},         {"memberships", r.memberships},
          {"unsound", r.unsound},   {"violations", r.violations},   {"interrupted", r.interrupted},
          {"passed", r.passed}};
}

nlohmann::json to_json(const UnbiasedCheck& r) {
  return {{"node", r.node.value},
          {"exact", r.exact},
          {"mean", r.mean},
          {"rho", r.rho},
          {"relative_error", r.relative_error},
          {"tolerance", r.tolerance},
          {"passed", r.passed}};
}

nlohmann::json to_json(const GuaranteeCheck& r) {
  auto arr = nlohmann::json::array();
  for (const auto& c : r.instances)
    arr.push_back({{"name", c.name},
                   {"n_vars", c.n_vars},
                   {"normalized_size", c.normalized_size},
                   {"exact", c.exact},
                   {"trials", c.trials},
                   {"successes", c.successes},
                   {"success_rate", c.success_rate},
                   {"mean_relative_error", c.mean_relative_error},
                   {"core_runs", c.core_runs},
                   {"interrupted_runs", c.interrupted_runs},
                   {"interrupt_rate", c.interrupt_rate},
                   {"passed", c.passed}});
  return {{"epsilon", r.epsilon}, {"delta", r.delta},       {"trials", r.trials},   {"threshold", r.threshold},
          {"no_theta", r.no_theta}, {"instances", std::move(arr)}, {"passed", r.passed}};
}

nlohmann::json to_json(const InterruptCheck& r) {
  return {{"core_runs", r.core_runs},
          {"interrupted", r.interrupted},
          {"rate", r.rate},
          {"ceiling", r.ceiling},
          {"passed", r.passed}};
}

}  // namespace nfbdd::harness
