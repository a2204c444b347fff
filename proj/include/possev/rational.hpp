#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

#include "possev/error.hpp"

namespace possev {

/// Exact rational arithmetic throughout: every theorem identity in this
/// library is an equality of rationals and is asserted without tolerance.
using Rat = boost::multiprecision::cpp_rational;
using Int = boost::multiprecision::cpp_int;

inline bool in_unit_interval(const Rat& x) { return x >= 0 && x <= 1; }

/// Parses "p/q", an integer "p", or a finite decimal like "0.75". Exact.
inline Rat parse_rat(std::string_view text) {
  auto fail = [&] { raise(errc::parse_error, "bad rational '" + std::string(text) + "'"); };
  if (text.empty()) fail();

  auto parse_int = [&](std::string_view s) -> Int {
    if (s.empty()) fail();
    std::size_t i = 0;
    bool neg = false;
    if (s[0] == '+' || s[0] == '-') {
      neg = s[0] == '-';
      i = 1;
      if (s.size() == 1) fail();
    }
    Int v = 0;
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') fail();
      v = v * 10 + (s[i] - '0');
    }
    return neg ? Int(-v) : v;
  };

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Int num = parse_int(text.substr(0, slash));
    Int den = parse_int(text.substr(slash + 1));
    if (den == 0) fail();
    return Rat(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view frac = text.substr(dot + 1);
    if (frac.empty()) fail();
    std::string_view whole = text.substr(0, dot);
    bool neg = !whole.empty() && whole[0] == '-';
    if (!whole.empty() && (whole[0] == '+' || whole[0] == '-')) whole = whole.substr(1);
    Int w = whole.empty() ? Int(0) : parse_int(whole);
    Int scale = 1;
    Int f = 0;
    for (char c : frac) {
      if (c < '0' || c > '9') fail();
      f = f * 10 + (c - '0');
      scale *= 10;
    }
    Rat v = Rat(w) + Rat(f, scale);
    return neg ? Rat(-v) : v;
  }
  return Rat(parse_int(text));
}

/// "p/q", or "p" when the denominator is 1.
inline std::string to_fraction_string(const Rat& x) {
  Int num = numerator(x);
  Int den = denominator(x);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

/// Fixed-point decimal rendering, default 6 places, round-half-up on the
/// magnitude. Used for display only; files and comparisons stay exact.
inline std::string to_decimal_string(const Rat& x, int places = 6) {
  Int num = numerator(x);
  Int den = denominator(x);
  bool neg = num < 0;
  if (neg) num = -num;
  Int scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  Int scaled = (num * scale * 2 + den) / (den * 2);  // round half up
  Int whole = scaled / scale;
  Int frac = scaled % scale;
  std::string fs = frac.str();
  fs.insert(fs.begin(), static_cast<std::size_t>(places) - fs.size(), '0');
  std::string out = whole.str();
  if (places > 0) out += "." + fs;
  return neg && scaled != 0 ? "-" + out : out;
}

/// True when x is a multiple of 2^-depth.
inline bool on_grid(const Rat& x, int depth) {
  Int den = denominator(x);
  // den must divide 2^depth, i.e. den is a power of two not exceeding it.
  Int limit = Int(1) << depth;
  return limit % den == 0;
}

/// floor(x * 2^depth) for x in [0,1]; the level index of a membership value.
inline std::int64_t grid_floor(const Rat& x, int depth) {
  Int v = (numerator(x) << depth) / denominator(x);
  return static_cast<std::int64_t>(v);
}

}  // namespace possev
