#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace pptc {

// Exact rational arithmetic. Probability weights are never floats:
// distribution equality is part of every bisimulation definition, and
// exactness is what makes it decidable.
using Rational = boost::multiprecision::cpp_rational;

inline Rational rat(long long num, long long den = 1) {
  return Rational(num, den);
}

std::string to_string(const Rational& r);

// Accepts "p/q" and plain integers. Empty optional on malformed input.
std::optional<Rational> parse_rational(std::string_view text);

inline bool is_probability(const Rational& r) { return r >= 0 && r <= 1; }
inline bool is_strict_probability(const Rational& r) { return r > 0 && r < 1; }

}  // namespace pptc
