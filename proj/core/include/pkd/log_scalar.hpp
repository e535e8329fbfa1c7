#pragma once

#include <compare>
#include <string>

namespace pkd {

/// Nonnegative real stored as its natural logarithm.
///
/// Carries magnitudes far below the double range (e.g. 1e-3657) without
/// underflow. Zero is represented explicitly; every other value keeps a
/// finite `ln()`.
class LogScalar {
 public:
  /// Zero.
  constexpr LogScalar() = default;

  static constexpr LogScalar zero() { return {}; }
  static constexpr LogScalar one() { return from_log(0.0); }
  static constexpr LogScalar from_log(double ln_value) {
    LogScalar s;
    s.is_zero_ = false;
    s.ln_ = ln_value;
    return s;
  }
  /// Throws DomainError for negative or non-finite input.
  static LogScalar from_double(double value);

  [[nodiscard]] constexpr bool is_zero() const { return is_zero_; }
  /// Natural log of the magnitude; -inf for zero.
  [[nodiscard]] double ln() const;
  /// Base-10 log of the magnitude; -inf for zero.
  [[nodiscard]] double log10() const;
  /// Plain double; underflows to 0 below ~1e-308.
  [[nodiscard]] double to_double() const;

  /// Decimal mantissa in [1, 10) and integer exponent. Zero gives (0, 0).
  struct Decimal {
    double mantissa = 0.0;
    long long exponent = 0;
  };
  [[nodiscard]] Decimal decimal() const;
  /// Scientific notation with `significant` digits, e.g. "1.94e-3657".
  [[nodiscard]] std::string to_scientific(int significant = 3) const;

  LogScalar& operator*=(const LogScalar& rhs);
  LogScalar& operator/=(const LogScalar& rhs);
  LogScalar& operator+=(const LogScalar& rhs);

  friend LogScalar operator*(LogScalar a, const LogScalar& b) { return a *= b; }
  friend LogScalar operator/(LogScalar a, const LogScalar& b) { return a /= b; }
  friend LogScalar operator+(LogScalar a, const LogScalar& b) { return a += b; }

  [[nodiscard]] LogScalar sqrt() const;
  [[nodiscard]] LogScalar pow(double exponent) const;

  friend std::partial_ordering operator<=>(const LogScalar& a,
                                           const LogScalar& b);
  friend bool operator==(const LogScalar& a, const LogScalar& b);

 private:
  bool is_zero_ = true;
  double ln_ = 0.0;
};

/// ln(exp(a) + exp(b)) without overflow.
double log_add_exp(double a, double b);

/// ln(1 + x) for x given as a LogScalar, accurate for tiny and huge x.
double log1p(const LogScalar& x);

}  // namespace pkd
