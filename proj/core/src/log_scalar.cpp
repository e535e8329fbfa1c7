#include "pkd/log_scalar.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "pkd/errors.hpp"

namespace pkd {

LogScalar LogScalar::from_double(double value) {
  if (!std::isfinite(value) || value < 0.0) {
    throw DomainError("LogScalar requires a finite nonnegative value");
  }
  if (value == 0.0) return zero();
  return from_log(std::log(value));
}

double LogScalar::ln() const {
  return is_zero_ ? -std::numeric_limits<double>::infinity() : ln_;
}

double LogScalar::log10() const { return ln() / std::numbers::ln10; }

double LogScalar::to_double() const { return is_zero_ ? 0.0 : std::exp(ln_); }

LogScalar::Decimal LogScalar::decimal() const {
  if (is_zero_) return {};
  const double l10 = ln_ / std::numbers::ln10;
  double exponent = std::floor(l10);
  double mantissa = std::pow(10.0, l10 - exponent);
  if (mantissa >= 10.0) {
    mantissa /= 10.0;
    exponent += 1.0;
  }
  return {mantissa, static_cast<long long>(exponent)};
}

std::string LogScalar::to_scientific(int significant) const {
  if (is_zero_) return "0";
  if (significant < 1) significant = 1;
  Decimal d = decimal();
  // Round the mantissa first so 9.996 renders as 1.00e+1, not 10.0e+0.
  const double scale = std::pow(10.0, significant - 1);
  double rounded = std::round(d.mantissa * scale) / scale;
  if (rounded >= 10.0) {
    rounded /= 10.0;
    d.exponent += 1;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*fe%lld", significant - 1, rounded,
                d.exponent);
  return buf;
}

LogScalar& LogScalar::operator*=(const LogScalar& rhs) {
  if (is_zero_ || rhs.is_zero_) {
    *this = zero();
  } else {
    ln_ += rhs.ln_;
  }
  return *this;
}

LogScalar& LogScalar::operator/=(const LogScalar& rhs) {
  if (rhs.is_zero_) throw DomainError("LogScalar division by zero");
  if (!is_zero_) ln_ -= rhs.ln_;
  return *this;
}

LogScalar& LogScalar::operator+=(const LogScalar& rhs) {
  if (rhs.is_zero_) return *this;
  if (is_zero_) {
    *this = rhs;
  } else {
    ln_ = log_add_exp(ln_, rhs.ln_);
  }
  return *this;
}

LogScalar LogScalar::sqrt() const {
  return is_zero_ ? zero() : from_log(0.5 * ln_);
}

LogScalar LogScalar::pow(double exponent) const {
  if (is_zero_) return exponent == 0.0 ? one() : zero();
  return from_log(exponent * ln_);
}

std::partial_ordering operator<=>(const LogScalar& a, const LogScalar& b) {
  if (a.is_zero_ && b.is_zero_) return std::partial_ordering::equivalent;
  if (a.is_zero_) return std::partial_ordering::less;
  if (b.is_zero_) return std::partial_ordering::greater;
  return a.ln_ <=> b.ln_;
}

bool operator==(const LogScalar& a, const LogScalar& b) {
  return (a <=> b) == std::partial_ordering::equivalent;
}

double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

double log1p(const LogScalar& x) {
  if (x.is_zero()) return 0.0;
  const double l = x.ln();
  // softplus(l) = ln(1 + e^l)
  if (l > 0.0) return l + std::log1p(std::exp(-l));
  return std::log1p(std::exp(l));
}

}  // namespace pkd
