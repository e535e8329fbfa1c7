#include <cmath>
#include <limits>

#include "doctest.h"
#include "pkd/errors.hpp"
#include "pkd/log_scalar.hpp"
#include "support/gen.hpp"

using pkd::LogScalar;

TEST_CASE("zero and one") {
  CHECK(LogScalar::zero().is_zero());
  CHECK(LogScalar::zero().to_double() == 0.0);
  CHECK(std::isinf(LogScalar::zero().ln()));
  CHECK(LogScalar::one().to_double() == 1.0);
  CHECK(LogScalar::from_double(0.0).is_zero());
  CHECK_THROWS_AS(LogScalar::from_double(-1.0), pkd::DomainError);
  CHECK_THROWS_AS(LogScalar::from_double(std::numeric_limits<double>::infinity()),
                  pkd::DomainError);
}

TEST_CASE("decimal rendering far below double range") {
  const double ln10 = std::log(10.0);
  const auto x = LogScalar::from_log(std::log(1.94) - 3657 * ln10);
  const auto d = x.decimal();
  CHECK(d.exponent == -3657);
  CHECK(d.mantissa == doctest::Approx(1.94).epsilon(1e-9));
  CHECK(x.to_scientific() == "1.94e-3657");
  CHECK(LogScalar::from_double(9.996).to_scientific() == "1.00e1");
  CHECK(LogScalar::zero().to_scientific() == "0");
}

TEST_CASE("arithmetic identities") {
  const auto a = LogScalar::from_double(3.0);
  const auto b = LogScalar::from_double(5.0);
  CHECK((a * b).to_double() == doctest::Approx(15.0).epsilon(1e-14));
  CHECK((b / a).to_double() == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
  CHECK((a + b).to_double() == doctest::Approx(8.0).epsilon(1e-14));
  CHECK((a + LogScalar::zero()).to_double() == doctest::Approx(3.0).epsilon(1e-15));
  CHECK((a * LogScalar::zero()).is_zero());
  CHECK_THROWS_AS(a / LogScalar::zero(), pkd::DomainError);
  CHECK(a.sqrt().to_double() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(a.pow(3).to_double() == doctest::Approx(27.0).epsilon(1e-14));
  CHECK(a < b);
  CHECK(LogScalar::zero() < a);
}

TEST_CASE("addition never overflows in log space") {
  const auto huge = LogScalar::from_log(1e6);
  const auto sum = huge + huge;
  CHECK(sum.ln() == doctest::Approx(1e6 + std::log(2.0)).epsilon(1e-15));
  const auto tiny = LogScalar::from_log(-1e6);
  CHECK((huge + tiny).ln() == doctest::Approx(1e6).epsilon(1e-15));
}

TEST_CASE("log1p is accurate at both ends") {
  CHECK(pkd::log1p(LogScalar::from_log(-8000.0)) == doctest::Approx(std::exp(-8000.0)));
  const double tiny_ln = -50.0;
  CHECK(pkd::log1p(LogScalar::from_log(tiny_ln)) ==
        doctest::Approx(std::log1p(std::exp(tiny_ln))).epsilon(1e-14));
  CHECK(pkd::log1p(LogScalar::from_log(800.0)) == doctest::Approx(800.0).epsilon(1e-15));
  CHECK(pkd::log1p(LogScalar::zero()) == 0.0);
}

TEST_CASE("property: plain doubles round-trip through ln") {
  testgen::Gen g(101);
  for (int i = 0; i < 5000; ++i) {
    const double v = std::exp(g.real(std::log(1e-300), std::log(1e300)));
    const double back = LogScalar::from_double(v).to_double();
    REQUIRE(std::abs(back - v) <= 1e-12 * v);
  }
}

TEST_CASE("property: products and sums match double arithmetic") {
  testgen::Gen g(102);
  for (int i = 0; i < 2000; ++i) {
    const double a = g.real(1e-10, 1e10);
    const double b = g.real(1e-10, 1e10);
    const auto la = LogScalar::from_double(a), lb = LogScalar::from_double(b);
    REQUIRE((la * lb).to_double() == doctest::Approx(a * b).epsilon(1e-12));
    REQUIRE((la + lb).to_double() == doctest::Approx(a + b).epsilon(1e-12));
    REQUIRE(pkd::log_add_exp(std::log(a), std::log(b)) ==
            doctest::Approx(std::log(a + b)).epsilon(1e-12));
  }
}
