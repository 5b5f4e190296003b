#pragma once

#include <charconv>
#include <cstdint>
#include <string>

#include "mcb/error.hpp"
#include "mcb/sim.hpp"

namespace mcb::detail {

// Shortest round-trip representation.
inline std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    fail(ErrorCode::kParse, "not a number: '" + text + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(const std::string& text) {
  Int v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    fail(ErrorCode::kParse, "not an integer: '" + text + "'");
  }
  return v;
}

inline std::string count_to_string(AdversaryCount c) { return c == AdversaryCount::kExact ? "exact" : "bernoulli"; }

inline AdversaryCount parse_count(const std::string& text) {
  if (text == "exact") return AdversaryCount::kExact;
  if (text == "bernoulli") return AdversaryCount::kBernoulli;
  fail(ErrorCode::kParse, "unknown adversary count '" + text + "'");
}

}  // namespace mcb::detail
