#pragma once

#include <string>

#include "json.hpp"

#include "nfbdd/fpras.hpp"

namespace nfbdd {

const char* method_name(CountReport::Method m);

/// Estimates with 6 significant digits.
std::string format_estimate(double x);

nlohmann::json to_json(const FprasParams& p);

/// Timing fields (per-run millis, wall_millis) only appear with
/// `include_timing`; without them the document is a pure function of
/// (input, epsilon, delta, seed).
nlohmann::json to_json(const CountReport& r, bool include_timing = false);

std::string to_text(const CountReport& r, bool include_timing = false);

}  // namespace nfbdd
