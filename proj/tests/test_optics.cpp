#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pkd/errors.hpp"
#include "pkd/optics_sim.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace pkd;
using namespace pkd::optics;

namespace {

constexpr double kPi = std::numbers::pi;

double trapezoid_rate(const OpticsParams& p, int nodes) {
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) acc += gains(p, 2 * kPi * i / nodes).total();
  return acc / nodes;
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(OpticsParams{}.validate());
  CHECK_THROWS_AS((OpticsParams{-0.1, 0.8, 1e-8}.validate()), ConfigError);
  CHECK_THROWS_AS((OpticsParams{0.1, 1.2, 1e-8}.validate()), ConfigError);
  CHECK_THROWS_AS((OpticsParams{0.1, 0.8, 1.0}.validate()), ConfigError);
  CHECK_THROWS_AS((OpticsParams{NAN, 0.8, 0.0}.validate()), ConfigError);
}

TEST_CASE("click probabilities at the extreme phases") {
  const OpticsParams p{0.1, 0.8, 1e-8};
  const ClickProbs c0 = click_probs(p, 0.0);
  CHECK(c0.left == doctest::Approx(1 - (1 - 1e-8) * std::exp(-0.16)).epsilon(1e-14));
  CHECK(c0.right == doctest::Approx(1e-8).epsilon(1e-12));
  const ClickProbs cpi = click_probs(p, kPi);
  CHECK(cpi.right == doctest::Approx(c0.left).epsilon(1e-14));
  const Gains g = gains(p, kPi / 2);
  CHECK(g.left == doctest::Approx(g.right).epsilon(1e-14));
}

TEST_CASE("property: gains match the closed form") {
  testgen::Gen g(601);
  for (int i = 0; i < 2000; ++i) {
    const OpticsParams p{g.real(0.0, 2.0), g.unit(), g.real(0.0, 0.1)};
    const double th = g.real(0.0, 2 * kPi);
    const Gains q = gains(p, th);
    const auto [ql, qr] = oracle::gains_closed_form(p.mu, p.eta_d, p.p_d, th);
    REQUIRE(std::abs(q.left - ql) <= 1e-15);
    REQUIRE(std::abs(q.right - qr) <= 1e-15);
  }
}

TEST_CASE("property: a pi shift swaps the detectors and gains stay bounded") {
  testgen::Gen g(602);
  for (int i = 0; i < 2000; ++i) {
    const OpticsParams p{g.real(0.0, 5.0), g.unit(), g.real(0.0, 0.5)};
    const double th = g.real(0.0, 2 * kPi);
    const Gains a = gains(p, th), b = gains(p, th + kPi);
    REQUIRE(a.left == doctest::Approx(b.right).epsilon(1e-12));
    REQUIRE(a.right == doctest::Approx(b.left).epsilon(1e-12));
    REQUIRE(a.left >= 0.0);
    REQUIRE(a.right >= 0.0);
    REQUIRE(a.total() <= 1.0);
  }
}

TEST_CASE("detection rate") {
  const OpticsParams p{};
  CHECK(detection_rate(p) == doctest::Approx(0.1449).epsilon(0.0005 / 0.1449));
  CHECK(std::abs(detection_rate(p) - trapezoid_rate(p, 4096)) < 1e-10);
  CHECK(detection_rate({0.0, 0.8, 0.0}) == 0.0);

  testgen::Gen g(603);
  for (int i = 0; i < 100; ++i) {
    const OpticsParams q{g.real(0.0, 3.0), g.unit(), g.real(0.0, 0.2)};
    REQUIRE(std::abs(detection_rate(q) - trapezoid_rate(q, 4096)) < 1e-10);
  }
}

TEST_CASE("bit error rate") {
  const double e = ber_analytic({0.1, 0.8, 1e-8});
  CHECK(e >= 0.24);
  CHECK(e <= 0.26);
  CHECK(std::abs(ber_analytic({1.25e-4, 0.8, 1e-8}) - 0.25) <= 1e-4);
  CHECK(ber_analytic({0.0, 0.8, 0.01}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ber_analytic({0.0, 0.8, 0.0}) == 0.0);
  CHECK(ber_detection_weighted({0.0, 0.8, 0.0}) == 0.0);
  CHECK(ber_detection_weighted({0.1, 0.8, 1e-8}) < e);
}

TEST_CASE("bit error rate against a finer quadrature") {
  const OpticsParams p{0.1, 0.8, 1e-8};
  constexpr int nodes = 40000;
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const auto [ql, qr] = oracle::gains_closed_form(p.mu, p.eta_d, p.p_d, 2 * kPi * i / nodes);
    acc += 2 * ql * qr / ((ql + qr) * (ql + qr));
  }
  CHECK(ber_analytic(p) == doctest::Approx(acc / nodes).epsilon(1e-9));
}

TEST_CASE("single rounds follow the click model") {
  const OpticsParams p{0.5, 0.8, 1e-3};
  RandomStream rng(11, StreamPurpose::test);
  constexpr int draws = 1'000'000;
  int events = 0, left = 0;
  for (int i = 0; i < draws; ++i) {
    if (auto ev = simulate_round(rng, p, i, 1, 4, 0)) {
      ++events;
      left += ev->detector == Detector::left ? 1 : 0;
      REQUIRE(ev->phase_index == 1);
      REQUIRE(ev->round == static_cast<std::uint64_t>(i));
    }
  }
  const double q = gains(p, kPi / 2).total();
  const double sigma = std::sqrt(draws * q * (1 - q));
  CHECK(std::abs(events - draws * q) <= 3 * sigma);
  CHECK(std::abs(left - events / 2.0) <= 3 * std::sqrt(events / 4.0));
}

TEST_CASE("key bit one shifts the phase by pi") {
  const OpticsParams p{1.0, 1.0, 0.0};
  RandomStream a(5, StreamPurpose::test), b(5, StreamPurpose::test);
  int diffs = 0;
  for (int i = 0; i < 1000; ++i) {
    auto e0 = simulate_round(a, p, i, 0, 8, 0);
    auto e1 = simulate_round(b, p, i, 4, 8, 1);
    REQUIRE(e0.has_value() == e1.has_value());
    if (e0) diffs += e0->detector != e1->detector;
  }
  CHECK(diffs == 0);
}

TEST_CASE("Monte Carlo detection fraction within 3 sigma") {
  const OpticsParams p{};
  constexpr std::uint64_t rounds = 1'000'000;
  const DetectionTally t = simulate_detections(p, 1024, rounds, 42, 1);
  const double q = detection_rate(p);
  CHECK(t.rounds == rounds);
  CHECK(t.left + t.right == t.events);
  CHECK(std::abs(static_cast<double>(t.events) - rounds * q) <= 3 * std::sqrt(rounds * q * (1 - q)));
  CHECK(simulate_detections(p, 1024, rounds, 42, 4) == t);
  CHECK(simulate_detections(p, 1024, rounds, 43, 1) != t);
}
