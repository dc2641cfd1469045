#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>

#include "conicwave/error.hpp"

namespace conicwave {

/// Reduced fraction with positive denominator.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t n, std::int64_t d) {
    if (d == 0) throw ValidationError("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    return {n / (g == 0 ? 1 : g), d / (g == 0 ? 1 : g)};
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend bool operator==(const Rational&, const Rational&) = default;
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Cone parameter: kept as an exact fraction when given as p/q.
class Alpha {
 public:
  Alpha() = default;

  static Alpha exact(std::int64_t p, std::int64_t q) {
    Alpha a;
    a.exact_ = Rational::make(p, q);
    a.value_ = a.exact_->value();
    a.validate();
    return a;
  }

  static Alpha decimal(double v) {
    Alpha a;
    a.value_ = v;
    a.validate();
    return a;
  }

  /// Accepts "p/q" (stored exactly) or a decimal literal.
  static Alpha parse(std::string_view text) {
    auto trim = [](std::string_view s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
      return s;
    };
    text = trim(text);
    if (text.empty()) throw ValidationError("empty alpha");
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      const auto lhs = trim(text.substr(0, slash));
      const auto rhs = trim(text.substr(slash + 1));
      std::int64_t p = 0, q = 0;
      auto r1 = std::from_chars(lhs.data(), lhs.data() + lhs.size(), p);
      auto r2 = std::from_chars(rhs.data(), rhs.data() + rhs.size(), q);
      if (r1.ec != std::errc{} || r1.ptr != lhs.data() + lhs.size() || r2.ec != std::errc{} ||
          r2.ptr != rhs.data() + rhs.size())
        throw ValidationError("malformed rational alpha '" + std::string(text) + "'");
      if (q == 0) throw ValidationError("alpha with zero denominator");
      return exact(p, q);
    }
    const std::string s(text);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) throw ValidationError("malformed alpha '" + s + "'");
    return decimal(v);
  }

  double value() const { return value_; }
  bool is_exact() const { return exact_.has_value(); }
  const std::optional<Rational>& rational() const { return exact_; }

  /// "p/q" when exact, otherwise 17 significant digits.
  std::string to_string() const {
    if (exact_) return std::to_string(exact_->num) + "/" + std::to_string(exact_->den);
    return format_double(value_);
  }

  friend bool operator==(const Alpha& a, const Alpha& b) {
    return a.exact_ == b.exact_ && a.value_ == b.value_;
  }

 private:
  void validate() const {
    if (!(value_ > 0.0) || !std::isfinite(value_))
      throw ValidationError("alpha must be a positive finite number, got " + format_double(value_));
  }

  std::optional<Rational> exact_;
  double value_ = 1.0;
};

}  // namespace conicwave
