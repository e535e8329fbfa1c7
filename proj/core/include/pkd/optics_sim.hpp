#pragma once

#include <cstdint>
#include <optional>

#include "pkd/random_stream.hpp"

/// Local single-photon interference measurement: analytic click and gain
/// model plus a seeded Monte Carlo of individual rounds.
namespace pkd::optics {

struct OpticsParams {
  /// Mean photon number per pulse.
  double mu = 0.1;
  /// Detector efficiency.
  double eta_d = 0.8;
  /// Dark count probability per detector per gate.
  double p_d = 1e-8;

  /// Throws ConfigError unless mu >= 0, 0 <= eta_d <= 1, 0 <= p_d < 1.
  void validate() const;
};

/// Marginal click probabilities of the two detectors; clicks are modelled as
/// independent.
struct ClickProbs {
  double left = 0.0;
  double right = 0.0;
};

/// Probabilities that exactly the named detector clicks.
struct Gains {
  double left = 0.0;
  double right = 0.0;
  [[nodiscard]] double total() const { return left + right; }
};

ClickProbs click_probs(const OpticsParams& p, double phi);
Gains gains(const OpticsParams& p, double phi);

/// Single-click probability per round averaged over a uniform phase,
/// 2[(1-p_d) e^{-x} I0(x) - (1-p_d)^2 e^{-2x}] with x = mu * eta_d.
double detection_rate(const OpticsParams& p);

/// Node count of the periodic trapezoid rule used for phase averages.
inline constexpr int kPhaseQuadratureNodes = 4096;

/// Bit error rate of phase-matched pairs, 2 Q_L Q_R / (Q_L + Q_R)^2 averaged
/// uniformly over the phase. The integrand is taken as 0 where Q_L + Q_R = 0.
double ber_analytic(const OpticsParams& p);

/// Same integrand weighted by the single-click probability Q_L + Q_R, i.e.
/// the expected error fraction over detected (rather than prepared) rounds.
double ber_detection_weighted(const OpticsParams& p);

enum class Detector : std::uint8_t { left = 0, right = 1 };

struct DetectionEvent {
  std::uint64_t round = 0;
  std::uint32_t phase_index = 0;
  std::uint8_t key_bit = 0;
  Detector detector = Detector::left;

  friend bool operator==(const DetectionEvent&, const DetectionEvent&) = default;
};

/// One interference round at signal phase 2*pi*j/m + r*pi. Returns an event
/// iff exactly one detector clicked. Consumes exactly two uniforms from rng.
std::optional<DetectionEvent> simulate_round(RandomStream& rng,
                                             const OpticsParams& p,
                                             std::uint64_t round,
                                             std::uint32_t phase_index,
                                             std::uint32_t m,
                                             std::uint8_t key_bit);

struct DetectionTally {
  std::uint64_t rounds = 0;
  std::uint64_t events = 0;
  std::uint64_t left = 0;
  std::uint64_t right = 0;

  friend bool operator==(const DetectionTally&, const DetectionTally&) = default;
};

/// Monte Carlo of `rounds` rounds with uniformly random phase index and key
/// bit, sharded per ShardPlan; the tally does not depend on `workers`.
DetectionTally simulate_detections(const OpticsParams& p, std::uint32_t m,
                                   std::uint64_t rounds,
                                   std::uint64_t master_seed,
                                   unsigned workers = 0);

}  // namespace pkd::optics
