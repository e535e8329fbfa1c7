#include "pkd/optics_sim.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "pkd/coherent_math.hpp"
#include "pkd/errors.hpp"

namespace pkd::optics {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double phase_of(std::uint32_t j, std::uint32_t m, std::uint8_t r) {
  return kTwoPi * static_cast<double>(j) / m +
         (r != 0 ? std::numbers::pi : 0.0);
}

template <class F>
double phase_average(F f) {
  double acc = 0.0;
  for (int i = 0; i < kPhaseQuadratureNodes; ++i) {
    acc += f(kTwoPi * i / kPhaseQuadratureNodes);
  }
  return acc / kPhaseQuadratureNodes;
}

double error_integrand(const Gains& g) {
  const double total = g.total();
  if (total <= 0.0) return 0.0;
  return 2.0 * g.left * g.right / (total * total);
}

}  // namespace

void OpticsParams::validate() const {
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw ConfigError("mu must be finite and >= 0");
  }
  if (!(eta_d >= 0.0 && eta_d <= 1.0)) {
    throw ConfigError("eta_d must lie in [0, 1]");
  }
  if (!(p_d >= 0.0 && p_d < 1.0)) throw ConfigError("p_d must lie in [0, 1)");
}

ClickProbs click_probs(const OpticsParams& p, double phi) {
  const double x = p.mu * p.eta_d;
  const double c = std::cos(phi);
  // 1 - (1 - p_d) e^{-y}, written to keep precision at small y.
  const auto click = [&](double y) {
    return -std::expm1(-y) + p.p_d * std::exp(-y);
  };
  return {click(x * (1.0 + c)), click(x * (1.0 - c))};
}

Gains gains(const OpticsParams& p, double phi) {
  const ClickProbs c = click_probs(p, phi);
  return {c.left * (1.0 - c.right), c.right * (1.0 - c.left)};
}

double detection_rate(const OpticsParams& p) {
  const double x = p.mu * p.eta_d;
  const double keep = 1.0 - p.p_d;
  return 2.0 * (keep * std::exp(-x) * coherent::bessel_i0(x) -
                keep * keep * std::exp(-2.0 * x));
}

double ber_analytic(const OpticsParams& p) {
  return phase_average([&](double th) { return error_integrand(gains(p, th)); });
}

double ber_detection_weighted(const OpticsParams& p) {
  const double weight = phase_average([&](double th) { return gains(p, th).total(); });
  if (weight <= 0.0) return 0.0;
  const double num = phase_average([&](double th) {
    const Gains g = gains(p, th);
    return g.total() * error_integrand(g);
  });
  return num / weight;
}

std::optional<DetectionEvent> simulate_round(RandomStream& rng,
                                             const OpticsParams& p,
                                             std::uint64_t round,
                                             std::uint32_t phase_index,
                                             std::uint32_t m,
                                             std::uint8_t key_bit) {
  const ClickProbs c = click_probs(p, phase_of(phase_index, m, key_bit));
  const bool left = rng.uniform() < c.left;
  const bool right = rng.uniform() < c.right;
  if (left == right) return std::nullopt;
  return DetectionEvent{round, phase_index, key_bit,
                        left ? Detector::left : Detector::right};
}

DetectionTally simulate_detections(const OpticsParams& p, std::uint32_t m,
                                   std::uint64_t rounds,
                                   std::uint64_t master_seed,
                                   unsigned workers) {
  p.validate();
  if (m == 0) throw ConfigError("phase count m must be >= 1");
  const ShardPlan plan{rounds};
  std::vector<DetectionTally> per_shard(plan.shard_count());
  for_each_shard(plan, workers, [&](std::uint64_t shard) {
    RandomStream rng(master_seed, StreamPurpose::alice_rounds, shard);
    DetectionTally t;
    for (std::uint64_t r = plan.begin(shard); r < plan.end(shard); ++r) {
      const auto j = static_cast<std::uint32_t>(rng.next_u64() % m);
      const auto bit = static_cast<std::uint8_t>(rng.bit());
      ++t.rounds;
      if (auto ev = simulate_round(rng, p, r, j, m, bit)) {
        ++t.events;
        if (ev->detector == Detector::left) {
          ++t.left;
        } else {
          ++t.right;
        }
      }
    }
    per_shard[shard] = t;
  });
  DetectionTally total;
  for (const auto& t : per_shard) {
    total.rounds += t.rounds;
    total.events += t.events;
    total.left += t.left;
    total.right += t.right;
  }
  return total;
}

}  // namespace pkd::optics
