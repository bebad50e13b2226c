#include "nfbdd/fpras.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "nfbdd/parallel.hpp"

namespace nfbdd {

namespace {

// Substream phases within one (run, node, copy).
constexpr std::uint64_t kPhaseSample = 0;
constexpr std::uint64_t kPhaseThin = 1;

double ratio(ExtProb num, ExtProb den) {
  if (den.is_infinite()) return 0.0;
  return std::min(1.0, num.value() / den.value());
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

/// The per-run sampler: owns the evaluator scratch and the node tables.
class Core {
 public:
  Core(const Normalized& nf, const FprasParams& params, std::uint64_t run, const CoreOptions& options)
      : b_(nf.diagram),
        layers_(nf.layers),
        params_(params),
        run_(run),
        options_(options),
        copies_(params.copies()),
        words_(std::max<std::size_t>(1, BitVec::word_count(nf.diagram.n_vars()))),
        eval_(nf.diagram),
        p_(nf.diagram.node_count(), ExtProb(1.0)),
        store_(nf.diagram.node_count()),
        pending_(nf.diagram.node_count(), 0) {
    if (options_.retain_hat) hat_.resize(b_.node_count());
    for (NodeId q : b_.bottom_up())
      for (NodeId c : b_.node(q).children) ++pending_[c.value];
  }

  CoreOutcome run() {
    CoreOutcome out;
    out.max_sample_size.assign(b_.node_count(), 0);

    for (NodeId q : layers_.layers[0]) {
      SampleStore s(copies_, words_);
      if (b_.node(q).kind == NodeKind::Sink1) {
        p_[q.value] = ExtProb(1.0);
        for (std::size_t r = 0; r < copies_; ++r) {
          s.push();  // the empty assignment
          s.close_copy();
        }
      } else {
        p_[q.value] = ExtProb::infinity();
        for (std::size_t r = 0; r < copies_; ++r) s.close_copy();
      }
      store_[q.value] = std::move(s);
      if (interrupt_check(q, out)) return finish(std::move(out));
      notify_leaf(q);
    }

    for (std::size_t i = 1; i < layers_.layers.size(); ++i) {
      for (NodeId q : layers_.layers[i]) {
        if (b_.node(q).kind == NodeKind::Decision)
          step_decision(q);
        else
          step_or(q);
        if (interrupt_check(q, out)) return finish(std::move(out));
        release_children(q);
      }
    }
    out.p_source = p_[b_.source().value];
    out.estimate = out.p_source.reciprocal();
    return finish(std::move(out));
  }

 private:
  SplitMix64 stream(NodeId q, std::size_t r, std::uint64_t phase) const {
    return SplitMix64(derive_seed(params_.seed, {run_, q.value, r, phase}));
  }

  void step_decision(NodeId q) {
    const Node& node = b_.node(q);
    const ExtProb p0 = p_[node.lo().value];
    const ExtProb p1 = p_[node.hi().value];
    ExtProb p;
    if (p0.is_infinite())
      p = p1;
    else if (p1.is_infinite())
      p = p0;
    else
      p = ExtProb(1.0 / (p0.reciprocal() + p1.reciprocal()));
    p_[q.value] = p;

    const double keep0 = ratio(p, p0);
    const double keep1 = ratio(p, p1);
    const SampleStore& s0 = *store_[node.lo().value];
    const SampleStore& s1 = *store_[node.hi().value];
    const std::uint32_t bit = node.var - 1;
    SampleStore s(copies_, words_);
    for (std::size_t r = 0; r < copies_; ++r) {
      SplitMix64 rng = stream(q, r, kPhaseSample);
      for (std::size_t i = 0, n = s0.size(r); i < n; ++i)
        if (bernoulli(rng, keep0)) s.push(s0.sample(r, i));
      for (std::size_t i = 0, n = s1.size(r); i < n; ++i)
        if (bernoulli(rng, keep1)) {
          std::uint64_t* w = s.push();
          std::copy_n(s1.sample(r, i), words_, w);
          w[bit >> 6] |= std::uint64_t{1} << (bit & 63);
        }
      s.close_copy();
    }
    store_[q.value] = std::move(s);
    notify(q, ExtProb::infinity(), ExtProb::infinity(), {}, nullptr);
  }

  void step_or(NodeId q) {
    const Node& node = b_.node(q);
    ExtProb rho = ExtProb::infinity();
    for (NodeId c : node.children) rho = min(rho, p_[c.value]);
    std::vector<double> keep;
    keep.reserve(node.children.size());
    for (NodeId c : node.children) keep.push_back(ratio(rho, p_[c.value]));

    SampleStore hat(copies_, words_);
    for (std::size_t r = 0; r < copies_; ++r) {
      SplitMix64 rng = stream(q, r, kPhaseSample);
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        const SampleStore& si = *store_[node.children[i].value];
        for (std::size_t k = 0, n = si.size(r); k < n; ++k) {
          if (!bernoulli(rng, keep[i])) continue;
          const std::uint64_t* alpha = si.sample(r, k);
          bool first = true;
          for (std::size_t j = 0; j < i && first; ++j) first = !eval_.eval(node.children[j], alpha);
          if (first) hat.push(alpha);
        }
      }
      hat.close_copy();
    }

    // Median of means over n_t batches of n_s copies.
    std::vector<double> means(params_.n_t, 0.0);
    for (std::size_t j = 0; j < params_.n_t; ++j) {
      std::uint64_t sum = 0;
      for (std::size_t r = j * params_.n_s; r < (j + 1) * params_.n_s; ++r) sum += hat.size(r);
      means[j] = static_cast<double>(sum) / (rho.value() * static_cast<double>(params_.n_s));
    }
    const ExtProb rho_hat = ExtProb::inverse_of(lower_median(means));
    const ExtProb p = min(rho, rho_hat);
    p_[q.value] = p;

    std::optional<SampleStore> kept_hat;
    if (options_.retain_hat) kept_hat = hat;
    const double thin = ratio(p, rho);
    std::size_t current = static_cast<std::size_t>(-1);
    SplitMix64 rng(0);
    hat.filter([&](std::size_t r, std::size_t) {
      if (r != current) {
        current = r;
        rng = stream(q, r, kPhaseThin);
      }
      return bernoulli(rng, thin);
    });
    store_[q.value] = std::move(hat);
    notify(q, rho, rho_hat, means, kept_hat ? &*kept_hat : nullptr);
    if (options_.retain_hat) hat_[q.value] = std::move(kept_hat);
  }

  bool interrupt_check(NodeId q, CoreOutcome& out) {
    const SampleStore& s = *store_[q.value];
    std::size_t biggest = 0;
    std::size_t at = 0;
    for (std::size_t r = 0; r < copies_; ++r)
      if (s.size(r) > biggest) {
        biggest = s.size(r);
        at = r;
      }
    out.max_sample_size[q.value] = biggest;
    if (params_.theta == FprasParams::kNoTheta || biggest < params_.theta) return false;
    out.interrupted = true;
    out.interrupt_node = q;
    out.estimate = 0;
    if (options_.observer) options_.observer->on_interrupt(q, at, biggest);
    return true;
  }

  void release_children(NodeId q) {
    if (options_.retain_samples) return;
    for (NodeId c : b_.node(q).children)
      if (--pending_[c.value] == 0) store_[c.value].reset();
  }

  void notify_leaf(NodeId q) { notify(q, ExtProb::infinity(), ExtProb::infinity(), {}, nullptr); }

  void notify(NodeId q, ExtProb rho, ExtProb rho_hat, std::span<const double> means, const SampleStore* hat) {
    if (!options_.observer) return;
    NodeEvent e{q, b_.node(q).kind, layers_.layer_of[q.value], p_[q.value], rho, rho_hat, means,
                &*store_[q.value], hat, run_};
    options_.observer->on_node(e);
  }

  CoreOutcome finish(CoreOutcome out) {
    if (options_.retain_samples) {
      SamplerState st;
      st.p = std::move(p_);
      st.samples = std::move(store_);
      st.hat = std::move(hat_);
      out.state = std::move(st);
    }
    return out;
  }

  const Nfbdd& b_;
  const LayerIndex& layers_;
  const FprasParams& params_;
  std::uint64_t run_;
  const CoreOptions& options_;
  std::size_t copies_;
  std::size_t words_;
  Evaluator eval_;
  std::vector<ExtProb> p_;
  std::vector<std::optional<SampleStore>> store_;
  std::vector<std::optional<SampleStore>> hat_;
  std::vector<std::uint32_t> pending_;
};

}  // namespace

std::uint64_t ceil_count(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<std::uint64_t>(std::max(r, 0.0));
  return static_cast<std::uint64_t>(std::max(std::ceil(x), 0.0));
}

FprasParams params_from(double epsilon, double delta, std::size_t n, std::size_t size, std::uint64_t seed) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) throw InvalidParameter("epsilon must be a positive number");
  if (!(delta > 0 && delta < 1)) throw InvalidParameter("delta must lie in (0, 1)");
  FprasParams p;
  p.epsilon = epsilon;
  p.delta = delta;
  p.seed = seed;
  p.kappa = epsilon / (1 + epsilon);
  p.n_s = std::max<std::uint64_t>(1, ceil_count(4.0 * static_cast<double>(n) / (p.kappa * p.kappa)));
  p.n_t = std::max<std::uint64_t>(1, ceil_count(8.0 * std::log(16.0 * static_cast<double>(size))));
  p.theta = std::max<std::uint64_t>(1, ceil_count(16.0 * static_cast<double>(p.n_s) * static_cast<double>(p.n_t) *
                                                  (1 + p.kappa) * static_cast<double>(size)));
  p.m = std::max<std::uint64_t>(1, ceil_count(8.0 * std::log(1.0 / delta)));
  return p;
}

double lower_median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty sequence");
  auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

std::vector<Assignment> reduce_set(std::span<const Assignment> set, double p, SplitMix64& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("reduce probability outside [0, 1]");
  std::vector<Assignment> out;
  for (const auto& a : set)
    if (bernoulli(rng, p)) out.push_back(a);
  return out;
}

std::vector<Assignment> union_first_model(const Nfbdd& b, NodeId q, std::span<const std::vector<Assignment>> sets) {
  const Node& node = b.node(q);
  if (node.kind != NodeKind::Or) throw Error("union_first_model needs an Or node");
  if (sets.size() != node.children.size()) throw Error("one sample set per child expected");
  Evaluator ev(b);
  std::vector<Assignment> out;
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (const auto& alpha : sets[i]) {
      bool first = true;
      for (std::size_t j = 0; j < i && first; ++j)
        first = !ev.eval(node.children[j], alpha.values().data().data());
      if (first) out.push_back(alpha);
    }
  return out;
}

Assignment SampleStore::assignment(std::size_t r, std::size_t i, const VarSet& vars) const {
  Assignment a(vars.n_vars());
  const std::uint64_t* w = sample(r, i);
  for (auto v : vars.members()) a.bind(v, (w[(v - 1) >> 6] >> ((v - 1) & 63)) & 1U);
  return a;
}

CoreOutcome core_run(const Normalized& b, const FprasParams& params, std::uint64_t run, const CoreOptions& options) {
  return Core(b, params, run, options).run();
}

CountReport approx_count(const Nfbdd& b, double epsilon, double delta, std::uint64_t seed,
                         const CountOptions& options) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) throw InvalidParameter("epsilon must be a positive number");
  if (!(delta > 0 && delta < 1)) throw InvalidParameter("delta must lie in (0, 1)");
  return approx_count(normalize(b), b.size(), epsilon, delta, seed, options);
}

CountReport approx_count(const NormalForm& nf, std::size_t input_size, double epsilon, double delta,
                         std::uint64_t seed, const CountOptions& options) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) throw InvalidParameter("epsilon must be a positive number");
  if (!(delta > 0 && delta < 1)) throw InvalidParameter("delta must lie in (0, 1)");
  const auto start = std::chrono::steady_clock::now();
  CountReport rep;
  rep.epsilon = epsilon;
  rep.delta = delta;
  rep.seed = seed;
  rep.input_size = input_size;

  if (std::holds_alternative<ConstantFalse>(nf)) {
    rep.method = CountReport::Method::ConstantFalse;
    rep.exact = 0;
    rep.wall_millis = elapsed_ms(start);
    return rep;
  }
  const Normalized& norm = std::get<Normalized>(nf);
  const Nfbdd& b = norm.diagram;
  rep.n_vars = b.n_vars();
  rep.normalized_size = b.size();

  if (b.n_vars() == 0) {
    // The only normal form over no variables is the 1-sink.
    rep.method = CountReport::Method::NoVariables;
    rep.estimate = 1;
    rep.exact = 1;
    rep.wall_millis = elapsed_ms(start);
    return rep;
  }
  if (options.exact_threshold >= 0 && b.n_vars() <= static_cast<std::size_t>(options.exact_threshold)) {
    rep.method = CountReport::Method::Exact;
    rep.exact = count_exact(b, b.n_vars());
    rep.estimate = static_cast<double>(*rep.exact);
    rep.wall_millis = elapsed_ms(start);
    return rep;
  }

  FprasParams params = params_from(epsilon, delta, b.n_vars(), b.size(), seed);
  if (options.no_theta) params.theta = FprasParams::kNoTheta;
  rep.params = params;
  rep.runs.resize(params.m);
  parallel_for(params.m, options.threads, [&](unsigned, std::size_t j) {
    const auto t0 = std::chrono::steady_clock::now();
    CoreOptions core_opts;
    core_opts.observer = options.observer;
    const CoreOutcome out = core_run(norm, params, j, core_opts);
    rep.runs[j] = {out.estimate, out.interrupted, elapsed_ms(t0)};
  });
  std::vector<double> estimates;
  for (const auto& r : rep.runs) {
    estimates.push_back(r.estimate);
    rep.interrupted_runs += r.interrupted;
  }
  rep.estimate = lower_median(std::move(estimates));
  rep.wall_millis = elapsed_ms(start);
  return rep;
}

}  // namespace nfbdd
