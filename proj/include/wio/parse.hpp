#pragma once

// Tokenizer for the call-style mini-languages: `name(arg, arg, ...)`.

#include <wio/errors.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace wio {

struct CallExpr {
  std::string name;
  std::vector<double> args;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline double parse_number(std::string_view text) {
  text = detail::trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw ParseError("not a number: '" + std::string(text) + "'");
  if (!std::isfinite(v)) throw ParseError("number must be finite: '" + std::string(text) + "'");
  return v;
}

inline CallExpr parse_call(std::string_view text) {
  const auto s = detail::trim(text);
  const auto open = s.find('(');
  if (open == std::string_view::npos || s.back() != ')')
    throw ParseError("expected name(args...): '" + std::string(s) + "'");
  CallExpr out;
  out.name = std::string(detail::trim(s.substr(0, open)));
  if (out.name.empty()) throw ParseError("missing name in '" + std::string(s) + "'");
  auto body = detail::trim(s.substr(open + 1, s.size() - open - 2));
  if (body.empty()) return out;
  while (true) {
    const auto comma = body.find(',');
    out.args.push_back(parse_number(body.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return out;
}

inline void expect_arity(const CallExpr& c, std::size_t lo, std::size_t hi) {
  if (c.args.size() < lo || c.args.size() > hi)
    throw ParseError(c.name + ": expected " + std::to_string(lo) +
                     (lo == hi ? "" : ".." + std::to_string(hi)) + " arguments, got " +
                     std::to_string(c.args.size()));
}

/// Shortest round-trip decimal representation.
inline std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace wio
