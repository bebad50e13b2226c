#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>

#include "CLI11.hpp"
#include "nfbdd/errors.hpp"
#include "nfbdd/fpras.hpp"
#include "nfbdd/harness.hpp"
#include "nfbdd/io.hpp"
#include "nfbdd/report.hpp"
#include "nfbdd/transform.hpp"

namespace fs = std::filesystem;
using namespace nfbdd;

namespace {

constexpr int kExitParse = 1;
constexpr int kExitParams = 2;
constexpr int kExitCap = 3;

unsigned default_threads() {
  if (const char* env = std::getenv("NFBDD_THREADS")) {
    try {
      return static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring NFBDD_THREADS=" << env << '\n';
    }
  }
  return 0;
}

Nfbdd load(const std::string& path, bool dnf) {
  const std::string text = read_file(path);
  return dnf ? dnf_to_nfbdd(parse_dnf(text)) : parse_any(text);
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

class TraceObserver : public SamplerObserver {
 public:
  void on_node(const NodeEvent& e) override {
    std::size_t total = e.samples ? e.samples->total() : 0;
    std::lock_guard lock(mu_);
    std::fprintf(stderr, "trace run=%llu node=%u layer=%u kind=%s p=%.6g", static_cast<unsigned long long>(e.run),
                 e.node.value, e.layer, kind_name(e.kind), e.p.value());
    if (e.kind == NodeKind::Or) std::fprintf(stderr, " rho=%.6g rho_hat=%.6g", e.rho.value(), e.rho_hat.value());
    std::fprintf(stderr, " samples=%zu\n", total);
  }
  void on_interrupt(NodeId node, std::size_t copy, std::size_t size) override {
    std::lock_guard lock(mu_);
    std::fprintf(stderr, "trace interrupt node=%u copy=%zu size=%zu\n", node.value, copy, size);
  }

 private:
  static const char* kind_name(NodeKind k) {
    switch (k) {
      case NodeKind::Sink0:
        return "F";
      case NodeKind::Sink1:
        return "T";
      case NodeKind::Decision:
        return "d";
      case NodeKind::Or:
        return "o";
    }
    return "?";
  }
  std::mutex mu_;
};

std::vector<harness::Instance> corpus_from(const std::vector<std::string>& inputs, const std::string& dir, bool dnf) {
  std::vector<std::string> files = inputs;
  if (!dir.empty()) {
    std::vector<std::string> found;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file()) found.push_back(entry.path().string());
    std::sort(found.begin(), found.end());
    files.insert(files.end(), found.begin(), found.end());
  }
  std::vector<harness::Instance> corpus;
  for (const auto& f : files) corpus.push_back({fs::path(f).filename().string(), load(f, dnf)});
  return corpus;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate model counting for non-deterministic read-once branching programs"};
  app.require_subcommand(1);

  std::string input;
  std::string output;
  bool dnf = false;
  double epsilon = 0.5;
  double delta = 0.25;
  std::uint64_t seed = 0;
  std::string format = "text";
  unsigned threads = default_threads();
  bool no_theta = false;
  bool timing = false;
  bool trace = false;
  bool exact_when_small = true;
  int exact_limit = 16;

  auto add_common = [&](CLI::App* sub) {
    sub->add_flag("--dnf", dnf, "Read the input as a DNF formula");
    sub->add_option("--threads", threads, "Worker threads (0 = auto; default from NFBDD_THREADS)");
  };
  auto add_sampling = [&](CLI::App* sub) {
    sub->add_option("--epsilon,-e", epsilon, "Relative error")->capture_default_str();
    sub->add_option("--delta,-d", delta, "Failure probability")->capture_default_str();
    sub->add_option("--seed,-s", seed, "Master seed")->capture_default_str();
    sub->add_option("--format,-f", format, "Output format")->check(CLI::IsMember({"json", "text"}));
    sub->add_flag("--no-theta", no_theta, "Disable the sample-size interrupt");
  };

  auto* count = app.add_subcommand("count", "Estimate the number of models");
  count->add_option("input", input, "Diagram file")->required();
  add_common(count);
  add_sampling(count);
  count->add_flag("--exact-when-small,!--no-exact-when-small", exact_when_small,
                  "Return the brute-force count when n is small (default on)");
  count->add_option("--exact-limit", exact_limit, "Largest n answered exactly")->capture_default_str();
  count->add_flag("--timing", timing, "Include timing in the report");
  count->add_flag("--trace", trace, "Per-node diagnostics on stderr");

  auto* exact = app.add_subcommand("exact", "Brute-force model count");
  exact->add_option("input", input, "Diagram file")->required();
  add_common(exact);

  auto* norm = app.add_subcommand("normalize", "Write the layered normal form");
  norm->add_option("input", input, "Diagram file")->required();
  norm->add_option("-o,--output", output, "Output file (default stdout)");
  add_common(norm);

  auto* val = app.add_subcommand("validate", "Check that a file describes a valid diagram");
  val->add_option("input", input, "Diagram file")->required();
  add_common(val);

  std::size_t gen_n = 0;
  std::size_t gen_edges = 0;
  auto* gen = app.add_subcommand("gen", "Generate a random diagram");
  gen->add_option("n", gen_n, "Number of variables")->required();
  gen->add_option("edges", gen_edges, "Target edge count")->required();
  gen->add_option("--seed,-s", seed, "Seed")->capture_default_str();
  gen->add_option("-o,--output", output, "Output file (default stdout)");

  std::vector<std::string> cal_inputs;
  std::string corpus_dir;
  std::size_t trials = 100;
  auto* cal = app.add_subcommand("calibrate", "Compare repeated estimates with the exact count");
  cal->add_option("inputs", cal_inputs, "Diagram files");
  cal->add_option("--corpus", corpus_dir, "Directory of diagram files")->check(CLI::ExistingDirectory);
  cal->add_option("--trials", trials, "Estimates per instance")->capture_default_str();
  add_common(cal);
  add_sampling(cal);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*count) {
      const Nfbdd b = load(input, dnf);
      CountOptions opts;
      opts.threads = threads;
      opts.no_theta = no_theta;
      opts.exact_threshold = exact_when_small ? exact_limit : -1;
      TraceObserver tracer;
      if (trace) opts.observer = &tracer;
      const CountReport rep = approx_count(b, epsilon, delta, seed, opts);
      if (format == "json")
        std::cout << to_json(rep, timing).dump(2) << '\n';
      else
        std::cout << to_text(rep, timing);
    } else if (*exact) {
      std::cout << count_exact(load(input, dnf)) << '\n';
    } else if (*norm) {
      const NormalForm nf = normalize(load(input, dnf));
      if (const auto* n = std::get_if<Normalized>(&nf))
        write_output(output, serialize_nfbdd(n->diagram));
      else
        write_output(output, "CONSTANT_FALSE\n");
    } else if (*val) {
      const Nfbdd b = load(input, dnf);
      std::cout << "valid: " << b.n_vars() << " variables, " << b.node_count() << " nodes, " << b.size()
                << " edges\n";
    } else if (*gen) {
      write_output(output, serialize_nfbdd(gen_random(gen_n, gen_edges, seed)));
    } else if (*cal) {
      if (!(epsilon > 0)) throw InvalidParameter("epsilon must be a positive number");
      if (!(delta > 0 && delta < 1)) throw InvalidParameter("delta must lie in (0, 1)");
      const auto corpus = corpus_from(cal_inputs, corpus_dir, dnf);
      if (corpus.empty()) throw InvalidParameter("calibrate needs input files or --corpus");
      harness::GuaranteeOptions opts;
      opts.threads = threads;
      opts.no_theta = no_theta;
      const auto rep = harness::check_guarantee(corpus, epsilon, delta, trials, seed, opts);
      if (format == "json") {
        std::cout << harness::to_json(rep).dump(2) << '\n';
      } else {
        std::printf("%-24s %4s %12s %8s %10s %10s\n", "instance", "n", "exact", "success", "mean_err", "interrupt");
        for (const auto& c : rep.instances)
          std::printf("%-24s %4zu %12llu %8.3f %10.4f %10.4f\n", c.name.c_str(), c.n_vars,
                      static_cast<unsigned long long>(c.exact), c.success_rate, c.mean_relative_error,
                      c.interrupt_rate);
      }
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << input << ": " << e.what() << '\n';
    return kExitParse;
  } catch (const InvalidDiagram& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const InvalidParameter& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParams;
  } catch (const CapExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  }
  return 0;
}
