#include "nfbdd/report.hpp"

#include <cstdio>
#include <sstream>

namespace nfbdd {

const char* method_name(CountReport::Method m) {
  switch (m) {
    case CountReport::Method::Fpras:
      return "fpras";
    case CountReport::Method::ConstantFalse:
      return "constant_false";
    case CountReport::Method::NoVariables:
      return "no_variables";
    case CountReport::Method::Exact:
      return "exact";
  }
  return "?";
}

std::string format_estimate(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

nlohmann::json to_json(const FprasParams& p) {
  nlohmann::json j;
  j["epsilon"] = p.epsilon;
  j["delta"] = p.delta;
  j["kappa"] = p.kappa;
  j["n_s"] = p.n_s;
  j["n_t"] = p.n_t;
  if (p.theta == FprasParams::kNoTheta)
    j["theta"] = nullptr;
  else
    j["theta"] = p.theta;
  j["m"] = p.m;
  j["seed"] = p.seed;
  return j;
}

nlohmann::json to_json(const CountReport& r, bool include_timing) {
  nlohmann::json j;
  j["method"] = method_name(r.method);
  j["estimate"] = format_estimate(r.estimate);
  j["estimate_raw"] = r.estimate;
  j["exact"] = r.exact ? nlohmann::json(*r.exact) : nlohmann::json(nullptr);
  j["epsilon"] = r.epsilon;
  j["delta"] = r.delta;
  j["seed"] = r.seed;
  j["n_vars"] = r.n_vars;
  j["input_size"] = r.input_size;
  j["normalized_size"] = r.normalized_size ? nlohmann::json(*r.normalized_size) : nlohmann::json(nullptr);
  j["params"] = r.params ? to_json(*r.params) : nlohmann::json(nullptr);
  auto runs = nlohmann::json::array();
  for (const auto& run : r.runs) {
    nlohmann::json o{{"estimate", run.estimate}, {"interrupted", run.interrupted}};
    if (include_timing) o["millis"] = run.millis;
    runs.push_back(std::move(o));
  }
  j["runs"] = std::move(runs);
  j["interrupted_runs"] = r.interrupted_runs;
  if (include_timing) j["wall_millis"] = r.wall_millis;
  return j;
}

std::string to_text(const CountReport& r, bool include_timing) {
  std::ostringstream out;
  out << "estimate          " << format_estimate(r.estimate) << '\n';
  out << "method            " << method_name(r.method) << '\n';
  if (r.exact) out << "exact             " << *r.exact << '\n';
  out << "epsilon, delta    " << r.epsilon << ", " << r.delta << '\n';
  out << "seed              " << r.seed << '\n';
  out << "variables         " << r.n_vars << '\n';
  out << "size (in / norm)  " << r.input_size << " / "
      << (r.normalized_size ? std::to_string(*r.normalized_size) : "-") << '\n';
  if (r.params) {
    const auto& p = *r.params;
    out << "kappa             " << p.kappa << '\n';
    out << "n_s x n_t         " << p.n_s << " x " << p.n_t << '\n';
    out << "theta             " << (p.theta == FprasParams::kNoTheta ? "none" : std::to_string(p.theta)) << '\n';
    out << "runs (m)          " << p.m << '\n';
    out << "interrupted runs  " << r.interrupted_runs << '\n';
    out << "\n  run  estimate      interrupted" << (include_timing ? "  millis" : "") << '\n';
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
      char line[128];
      std::snprintf(line, sizeof line, "  %3zu  %-12s  %-11s", i, format_estimate(r.runs[i].estimate).c_str(),
                    r.runs[i].interrupted ? "yes" : "no");
      out << line;
      if (include_timing) out << "  " << format_estimate(r.runs[i].millis);
      out << '\n';
    }
  }
  if (include_timing) out << "wall millis       " << format_estimate(r.wall_millis) << '\n';
  return out.str();
}

}  // namespace nfbdd
