#pragma once

#include <cstdint>
#include <optional>

#include "pkd/log_scalar.hpp"

/// Scalar mathematics of phase-randomized weak coherent states.
///
/// Phases are radians in [0, 2*pi); the discrete phase index j stands for
/// 2*pi*j/m. Magnitudes that can leave double range are returned as
/// LogScalar. All functions are pure and thread-safe.
namespace pkd::coherent {

/// Intensity mu, phase count m and pseudo photon-number index k (0 <= k < m).
struct PseudoPhotonSpec {
  double mu = 0.0;
  std::uint32_t m = 1;
  std::uint32_t k = 0;

  /// Throws DomainError unless mu >= 0, m >= 1 and k < m.
  void validate() const;
};

/// ln(n!), exact summation up to n = 256 and log-gamma above.
double log_factorial(std::uint64_t n);

/// Poisson weight e^-mu mu^k / k!.
LogScalar poisson_pmf(double mu, std::uint64_t k);

/// Weight of the k-th pseudo photon-number state of the m-phase mixture:
/// e^-mu * sum_{l>=0} mu^(lm+k) / (lm+k)!.
LogScalar pseudo_photon_prob(const PseudoPhotonSpec& spec);

/// Relative excess of the pseudo photon-number weight over the Poisson
/// weight, sum_{l>=1} mu^(lm) k! / (lm+k)!.
LogScalar prob_excess_delta(const PseudoPhotonSpec& spec);

/// Trace distance sqrt(1 - 1/(1 + delta)) between |lambda_k> and |k>.
LogScalar trace_distance_pseudo_fock(const PseudoPhotonSpec& spec);

/// Secrecy of the discrete phase, e^-mu mu^m / (2 m!). Valid only for large
/// m; throws DomainError when m < 100.
LogScalar secrecy_epsilon(double mu, std::uint32_t m);

/// Phase probability density P(x | mu, theta) of a coherent state.
double phase_pdf(double mu, double theta, double x);

/// P(x | mu, theta) averaged over the m discrete phases 2*pi*j/m.
double avg_phase_pdf(double mu, std::uint32_t m, double x);

struct UsdProbability {
  /// Small-intensity form m mu^(m-1) / (m-1)!.
  LogScalar approx;
  /// Direct evaluation of the symmetric-state sum; only for m <= 12,
  /// beyond which the O(1) terms cancel below double resolution.
  std::optional<double> exact;
};

/// Largest m for which usd_probability() attempts the exact sum.
inline constexpr std::uint32_t kUsdExactMaxPhases = 12;

/// Optimal unambiguous discrimination probability of m symmetric coherent
/// states. Requires mu >= 0, m >= 2.
UsdProbability usd_probability(double mu, std::uint32_t m);

/// Error probability of the square-root (minimum error) measurement on m
/// symmetric coherent states with uniform prior.
///
/// Eigenvalues of the circulant Gram matrix are computed by an O(m^2) direct
/// transform; negative real parts from roundoff are clamped to zero. Throws
/// NumericFault if an eigenvalue's imaginary part exceeds 1e-9 of the largest
/// eigenvalue.
double min_error_probability(double mu, std::uint32_t m);

/// Modified Bessel function I0 by power series.
double bessel_i0(double x);

/// Binary entropy h(x) in bits; throws DomainError outside [0, 1].
double binary_entropy(double x);

/// Collected figures for one (mu, m) configuration.
struct AnalysisReport {
  double mu = 0.0;
  std::uint32_t m = 0;
  LogScalar p_usd;
  std::optional<double> p_usd_exact;
  double p_min = 0.0;
  LogScalar trace_distance_k0;
  LogScalar delta_k0;
  /// Empty when m is below the validity range of secrecy_epsilon().
  std::optional<LogScalar> secrecy_epsilon;
  double random_guess_error = 0.0;
};

AnalysisReport analyze(double mu, std::uint32_t m);

}  // namespace pkd::coherent
