// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [--only N[,N...]] [--report FILE] [--threads T]

#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <set>
#include <string>

#include "json.hpp"
#include "nfbdd/harness.hpp"
#include "nfbdd/io.hpp"
#include "nfbdd/report.hpp"

using namespace nfbdd;
using namespace nfbdd::harness;
using nlohmann::json;

namespace {

constexpr std::uint64_t kCorpusSeed = 20240611;
unsigned g_threads = 0;

struct Verdict {
  bool passed = false;
  std::string summary;
  json detail;
};

// Path-existence oracle, kept separate from the library's evaluator.
bool accepts(const Nfbdd& b, NodeId q, std::uint64_t bits) {
  const Node& node = b.node(q);
  switch (node.kind) {
    case NodeKind::Sink0:
      return false;
    case NodeKind::Sink1:
      return true;
    case NodeKind::Decision:
      return accepts(b, (bits >> (node.var - 1)) & 1U ? node.hi() : node.lo(), bits);
    case NodeKind::Or:
      for (NodeId c : node.children)
        if (accepts(b, c, bits)) return true;
      return false;
  }
  return false;
}

std::uint64_t oracle_count(const Nfbdd& b) {
  std::uint64_t c = 0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << b.n_vars()); ++bits) c += accepts(b, b.source(), bits);
  return c;
}

std::vector<Instance> guarantee_corpus() {
  auto corpus = generated_corpus(10, 4, 8, 80, kCorpusSeed);
  auto dnf = dnf_corpus(5, 4, 8, 80, kCorpusSeed + 1);
  corpus.insert(corpus.end(), std::make_move_iterator(dnf.begin()), std::make_move_iterator(dnf.end()));
  return corpus;
}

std::vector<Nfbdd> normalized_of(const std::vector<Instance>& corpus) {
  std::vector<Nfbdd> out;
  for (const auto& inst : corpus) out.push_back(std::get<Normalized>(normalize(inst.diagram)).diagram);
  return out;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Verdict criterion1() {
  const auto corpus = guarantee_corpus();
  GuaranteeOptions opts;
  opts.threads = g_threads;
  const auto rep = check_guarantee(corpus, 0.5, 0.25, 100, kCorpusSeed + 2, opts);
  // Ground truth comes from the local oracle, not from the harness.
  bool truth_ok = true;
  double worst = 1.0;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    truth_ok = truth_ok && rep.instances[k].exact == oracle_count(corpus[k].diagram);
    worst = std::min(worst, rep.instances[k].success_rate);
  }
  return {rep.passed && truth_ok && corpus.size() == 15,
          fmt("15 instances x 100 trials, lowest success rate %.2f (need >= 0.65)", worst), to_json(rep)};
}

Verdict criterion2() {
  struct Row {
    double eps, delta;
    std::size_t n, size;
    std::uint64_t n_s, n_t, theta, m;
  };
  // Integer columns computed offline with exact rationals and 50-digit logs.
  const Row rows[] = {
      {1, 0.5, 4, 10, 64, 41, 629760, 6},
      {0.5, 0.25, 8, 80, 288, 58, 28508160, 12},
      {0.5, 0.25, 4, 20, 144, 47, 2887680, 12},
      {0.1, 0.05, 10, 200, 4840, 65, 1098240000, 24},
      {2, 0.1, 3, 7, 27, 38, 191520, 19},
      {0.25, 0.01, 6, 50, 600, 54, 31104000, 37},
      {1, 0.5, 1, 4, 16, 34, 52224, 6},
      {0.75, 0.3, 5, 33, 109, 51, 4193075, 10},
      {0.2, 0.2, 12, 500, 1728, 72, 1161216000, 13},
      {3, 0.9, 2, 5, 15, 36, 75600, 1},
  };
  std::size_t ok = 0;
  json detail = json::array();
  for (const auto& r : rows) {
    const auto p = params_from(r.eps, r.delta, r.n, r.size);
    const bool match = p.kappa == r.eps / (1 + r.eps) && p.n_s == r.n_s && p.n_t == r.n_t && p.theta == r.theta &&
                       p.m == r.m;
    ok += match;
    detail.push_back({{"epsilon", r.eps}, {"delta", r.delta}, {"n", r.n}, {"size", r.size}, {"got", to_json(p)},
                      {"match", match}});
  }
  return {ok == std::size(rows), fmt("%.0f/%.0f parameter tuples match exactly", ok, std::size(rows)), detail};
}

Verdict criterion3() {
  auto corpus = generated_corpus(35, 1, 10, 1000, kCorpusSeed + 3);
  auto dnf = dnf_corpus(15, 2, 10, 1000, kCorpusSeed + 4);
  corpus.insert(corpus.end(), dnf.begin(), dnf.end());
  std::size_t mismatches = 0, structural = 0, evaluations = 0;
  for (const auto& inst : corpus) {
    const Nfbdd& b = inst.diagram;
    const auto nf = normalize(b);
    if (std::holds_alternative<ConstantFalse>(nf)) {
      mismatches += oracle_count(b) != 0;
      continue;
    }
    const Nfbdd& n = std::get<Normalized>(nf).diagram;
    if (!(is_zero_reduced(n) && is_or_flattened(n) && is_one_complete(n) && is_alternating(n) && validate(n).ok()))
      ++structural;
    try {
      if (layers(n).layers.size() != 2 * b.n_vars() + 1) ++structural;
    } catch (const NotNormalForm&) {
      ++structural;
    }
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << b.n_vars()); ++bits, ++evaluations)
      mismatches += accepts(b, b.source(), bits) != accepts(n, n.source(), bits);
  }
  return {corpus.size() == 50 && mismatches == 0 && structural == 0,
          fmt("50 instances, %.0f evaluations, %.0f mismatches, %.0f structural failures", evaluations, mismatches,
              structural),
          {{"instances", corpus.size()}, {"evaluations", evaluations}, {"mismatches", mismatches},
           {"structural_failures", structural}}};
}

Verdict criterion4() {
  auto corpus = generated_corpus(14, 2, 8, 80, kCorpusSeed + 5);
  auto dnf = dnf_corpus(6, 2, 8, 80, kCorpusSeed + 6);
  corpus.insert(corpus.end(), dnf.begin(), dnf.end());
  const auto rep = check_divergence_bound(normalized_of(corpus), 8);
  return {rep.passed && rep.instances == 20,
          fmt("20 instances, %.0f bound checks, %.0f violations", rep.checks, rep.violations + rep.partition_errors),
          to_json(rep)};
}

Verdict criterion5() {
  auto corpus = generated_corpus(3, 4, 6, 60, kCorpusSeed + 7);
  auto dnf = dnf_corpus(2, 4, 6, 60, kCorpusSeed + 8);
  corpus.insert(corpus.end(), dnf.begin(), dnf.end());
  std::size_t runs = 0, violations = 0, samples = 0;
  bool all = true;
  json detail = json::array();
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto nf = std::get<Normalized>(normalize(corpus[k].diagram));
    const auto params = params_from(1.0, 0.25, nf.diagram.n_vars(), nf.diagram.size(), kCorpusSeed + 9 + k);
    const auto rep = check_path_consistency(nf, params, 10);
    runs += rep.runs;
    violations += rep.violations + rep.unsound;
    samples += rep.samples;
    all = all && rep.passed;
    detail.push_back(to_json(rep));
  }
  return {all && runs == 50,
          fmt("%.0f runs, %.0f samples traced, %.0f violations", runs, samples, violations), detail};
}

Verdict criterion6() {
  const char* formulas[] = {
      "p dnf 3 3\n1 0\n2 0\n1 3 0\n",
      "p dnf 4 3\n1 2 0\n2 3 0\n-1 4 0\n",
      "p dnf 5 4\n1 -2 0\n3 0\n1 5 0\n-4 -5 2 0\n",
  };
  bool all = true;
  double worst = 0;
  json detail = json::array();
  for (std::size_t k = 0; k < std::size(formulas); ++k) {
    const Nfbdd b = dnf_to_nfbdd(parse_dnf(formulas[k]));
    const auto nf = std::get<Normalized>(normalize(b));
    const auto rep = check_unbiased_or(nf, nf.diagram.source(), 10000, kCorpusSeed + 10 + k);
    all = all && rep.passed && rep.exact == oracle_count(b);
    worst = std::max(worst, rep.relative_error);
    detail.push_back(to_json(rep));
  }
  return {all, fmt("3 instances, 10^4 copies, worst relative error %.4f (need <= 0.05)", worst), detail};
}

Verdict criterion7() {
  const auto rep = check_interrupt_rate(guarantee_corpus(), 0.5, 0.25, 200, kCorpusSeed + 13, g_threads);
  return {rep.passed, fmt("%.0f of 200 core runs interrupted, rate %.3f (need <= 0.20)", rep.interrupted, rep.rate),
          to_json(rep)};
}

Verdict criterion8() {
  bool all = true;
  double worst = 0;
  json detail = json::array();
  for (double p : {0.1, 0.3, 0.9}) {
    const auto rep = check_reduce_distribution(100000, p, kCorpusSeed + 14);
    all = all && rep.passed;
    worst = std::max({worst, rep.max_frequency_dev, rep.max_covariance_dev});
    detail.push_back(to_json(rep));
  }
  return {all, fmt("p in {0.1, 0.3, 0.9}, 10^5 trials, largest deviation %.2f sigma (need <= 4)", worst), detail};
}

Verdict criterion9() {
  const auto corpus = generated_corpus(2, 5, 6, 60, kCorpusSeed + 15);
  bool all = true;
  for (const auto& inst : corpus) {
    CountOptions one, eight;
    eight.threads = 8;
    const auto a = to_json(approx_count(inst.diagram, 0.5, 0.25, 77, one)).dump();
    const auto b = to_json(approx_count(inst.diagram, 0.5, 0.25, 77, one)).dump();
    const auto c = to_json(approx_count(inst.diagram, 0.5, 0.25, 77, eight)).dump();
    all = all && a == b && a == c;
  }
  return {all, "CountReport JSON identical across repeated runs and 1 vs 8 workers", {{"instances", corpus.size()}}};
}

struct CountingObserver : SamplerObserver {
  std::size_t events = 0;
  void on_node(const NodeEvent&) override { ++events; }
};

Verdict criterion10() {
  CountingObserver obs;
  CountOptions opts;
  opts.observer = &obs;
  std::vector<Nfbdd> unsat;
  unsat.push_back(parse_nfbdd("p nfbdd 2 3\n1 F\n2 d 1 1 1\n3 d 2 2 2\ns 3\n"));
  unsat.push_back(parse_nfbdd("p nfbdd 3 4\n1 F\n2 d 3 1 1\n3 o 2 1 2\n4 d 1 3 1\ns 4\n"));
  unsat.push_back(Nfbdd(Diagram{4, {Node::sink0()}, NodeId{0}}));
  unsat.push_back(dnf_to_nfbdd(DnfFormula{3, {}}));
  bool ok = true;
  for (const auto& b : unsat) {
    const auto r = approx_count(b, 0.5, 0.25, 1, opts);
    ok = ok && oracle_count(b) == 0 && r.estimate == 0.0 && r.runs.empty() && !r.params;
  }
  const Nfbdd taut(Diagram{0, {Node::sink1()}, NodeId{0}});
  const auto t = approx_count(taut, 0.5, 0.25, 1, opts);
  ok = ok && t.estimate == 1.0 && t.runs.empty() && !t.params && obs.events == 0;
  return {ok, "4 unsatisfiable inputs gave exactly 0, the n = 0 tautology gave exactly 1, sampler never ran",
          {{"sampler_events", obs.events}}};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  std::string report_path;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--only") && i + 1 < argc) {
      std::string list = argv[++i];
      for (std::size_t pos = 0; pos < list.size();) {
        const auto comma = list.find(',', pos);
        only.insert(std::stoi(list.substr(pos, comma - pos)));
        pos = comma == std::string::npos ? list.size() : comma + 1;
      }
    } else if (!std::strcmp(argv[i], "--report") && i + 1 < argc) {
      report_path = argv[++i];
    } else if (!std::strcmp(argv[i], "--threads") && i + 1 < argc) {
      g_threads = static_cast<unsigned>(std::stoul(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--only N[,N...]] [--report FILE] [--threads T]\n", argv[0]);
      return 2;
    }
  }

  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"approximation guarantee", criterion1},    {"parameter formulas", criterion2},
      {"normalization soundness", criterion3},    {"divergence class bound", criterion4},
      {"sample path consistency", criterion5},    {"unbiased union estimate", criterion6},
      {"interrupt rate", criterion7},             {"reduce distribution", criterion8},
      {"determinism", criterion9},                {"degenerate inputs exact", criterion10},
  };

  json report = json::object();
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what(), nullptr};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %-26s %s  %s  [%.1fs]\n", id, criteria[i].first, v.passed ? "PASS" : "FAIL",
                v.summary.c_str(), secs);
    std::fflush(stdout);
    failed += !v.passed;
    report[std::to_string(id)] = {{"name", criteria[i].first}, {"passed", v.passed}, {"summary", v.summary},
                                  {"seconds", secs}, {"detail", v.detail}};
  }
  if (!report_path.empty()) std::ofstream(report_path) << report.dump(2) << '\n';
  std::printf("%d criteria failed\n", failed);
  return failed ? 1 : 0;
}
