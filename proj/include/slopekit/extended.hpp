#pragma once

#include <charconv>
#include <cmath>
#include <compare>
#include <limits>
#include <string>

namespace slopekit {

/// Nonnegative real extended by +infinity. Infinity stands for the value of
/// an infimum over an empty family of curves and is kept apart from every
/// finite value, however large.
class Extended {
 public:
  constexpr Extended() = default;
  constexpr explicit Extended(double v) : value_(v) {}

  static constexpr Extended infinite() {
    return Extended(std::numeric_limits<double>::infinity());
  }

  constexpr bool is_infinite() const { return value_ == std::numeric_limits<double>::infinity(); }
  constexpr bool is_finite() const { return !is_infinite(); }

  /// Raw representation; +inf when infinite.
  constexpr double raw() const { return value_; }

  constexpr auto operator<=>(const Extended&) const = default;

  std::string to_string() const;

 private:
  double value_ = 0.0;
};

/// Shortest decimal rendering that still carries 17 significant digits, so
/// written values round-trip exactly. Infinity renders as "inf".
inline std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::string Extended::to_string() const {
  return is_infinite() ? std::string("inf") : format_real(value_);
}

}  // namespace slopekit
