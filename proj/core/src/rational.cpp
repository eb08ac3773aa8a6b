#include "pptc/rational.hpp"

#include <cctype>

namespace pptc {

std::string to_string(const Rational& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) {
    s += "/";
    s += denominator(r).str();
  }
  return s;
}

std::optional<Rational> parse_rational(std::string_view text) {
  if (text.empty()) return std::nullopt;
  size_t slash = text.find('/');
  auto parse_int = [](std::string_view v) -> std::optional<boost::multiprecision::cpp_int> {
    if (v.empty()) return std::nullopt;
    size_t i = (v[0] == '-' || v[0] == '+') ? 1 : 0;
    if (i == v.size()) return std::nullopt;
    for (size_t k = i; k < v.size(); ++k)
      if (!std::isdigit(static_cast<unsigned char>(v[k]))) return std::nullopt;
    return boost::multiprecision::cpp_int(std::string(v));
  };
  if (slash == std::string_view::npos) {
    auto n = parse_int(text);
    if (!n) return std::nullopt;
    return Rational(*n);
  }
  auto n = parse_int(text.substr(0, slash));
  auto d = parse_int(text.substr(slash + 1));
  if (!n || !d || *d == 0) return std::nullopt;
  return Rational(*n, *d);
}

}  // namespace pptc
