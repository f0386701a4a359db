#pragma once

#include <limits>
#include <string>
#include <string_view>

namespace slicelab {

/// Exponent p of the unit ball B_p^n, p in (0, inf].
///
/// Regimes: `sub2()` for p in (0,2) where the stable-mixture determinant
/// formula applies, `finite()` for the density-at-zero formula, and
/// `cube()` for p = inf.
class PNorm {
 public:
  /// Throws std::invalid_argument unless 0 < p < inf.
  static PNorm finite_value(double p);
  static PNorm infinity() { return PNorm(std::numeric_limits<double>::infinity()); }
  /// Accepts a decimal number or "inf".
  static PNorm parse(std::string_view text);

  double value() const { return p_; }
  bool finite() const { return p_ < std::numeric_limits<double>::infinity(); }
  bool sub2() const { return p_ < 2.0; }
  bool cube() const { return !finite(); }

  std::string to_string() const;

  friend bool operator==(const PNorm&, const PNorm&) = default;

 private:
  explicit PNorm(double p) : p_(p) {}
  double p_;
};

}  // namespace slicelab
