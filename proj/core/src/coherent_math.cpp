#include "pkd/coherent_math.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "pkd/errors.hpp"

namespace pkd::coherent {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::uint64_t kExactFactorialLimit = 256;
// Series stop once a term is this small relative to the partial sum.
const double kLnSeriesTolerance = std::log(1e-30);
constexpr double kPoissonTailMass = 1e-14;
constexpr std::uint32_t kMinPhaseTerms = 30;

const std::array<double, kExactFactorialLimit + 1>& exact_log_factorials() {
  static const auto table = [] {
    std::array<double, kExactFactorialLimit + 1> t{};
    double acc = 0.0;
    t[0] = 0.0;
    for (std::uint64_t i = 1; i <= kExactFactorialLimit; ++i) {
      acc += std::log(static_cast<double>(i));
      t[i] = acc;
    }
    return t;
  }();
  return table;
}

void require_intensity(double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw DomainError("intensity mu must be finite and >= 0");
  }
}

// Sum of exp(ln_term(n)) over n = first, first + step, ... in log space,
// truncated once n exceeds mu (terms decreasing) and a term falls below
// 1e-30 of the partial sum.
template <class LnTerm>
LogScalar log_series(double mu, std::uint64_t first, std::uint64_t step,
                     LnTerm ln_term) {
  LogScalar sum;
  for (std::uint64_t n = first;; n += step) {
    const double lt = ln_term(n);
    if (!sum.is_zero() && static_cast<double>(n) > mu &&
        lt < sum.ln() + kLnSeriesTolerance) {
      break;
    }
    sum += LogScalar::from_log(lt);
    if (n > first + 100'000'000ULL) break;  // unreachable for sane inputs
  }
  return sum;
}

// Amplitudes e^{-mu/2} mu^{k/2} / sqrt(k!) up to the Poisson-tail cutoff.
std::vector<double> coherent_amplitudes(double mu) {
  std::vector<double> amp;
  if (mu == 0.0) {
    amp.push_back(1.0);
    return amp;
  }
  const double ln_mu = std::log(mu);
  double cumulative = 0.0;
  const auto cap = static_cast<std::uint64_t>(mu + 50.0 * std::sqrt(mu) + 200);
  for (std::uint64_t k = 0;; ++k) {
    const double ln_p = -mu + static_cast<double>(k) * ln_mu - log_factorial(k);
    const double p = std::exp(ln_p);
    amp.push_back(std::exp(0.5 * ln_p));
    cumulative += p;
    if ((cumulative >= 1.0 - kPoissonTailMass && k >= kMinPhaseTerms) ||
        k >= cap) {
      break;
    }
  }
  return amp;
}

double phase_pdf_from_amplitudes(const std::vector<double>& amp, double y) {
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t k = 0; k < amp.size(); ++k) {
    acc += amp[k] * std::polar(1.0, -y * static_cast<double>(k));
  }
  return std::norm(acc) / kTwoPi;
}

// Kahan-compensated complex accumulator in extended precision.
struct CompensatedSum {
  long double re = 0.0L, im = 0.0L, c_re = 0.0L, c_im = 0.0L;

  void add(long double x, long double y) {
    const long double yr = x - c_re;
    const long double tr = re + yr;
    c_re = (tr - re) - yr;
    re = tr;
    const long double yi = y - c_im;
    const long double ti = im + yi;
    c_im = (ti - im) - yi;
    im = ti;
  }
};

}  // namespace

void PseudoPhotonSpec::validate() const {
  require_intensity(mu);
  if (m < 1) throw DomainError("phase count m must be >= 1");
  if (k >= m) throw DomainError("pseudo photon index k must satisfy k < m");
}

double log_factorial(std::uint64_t n) {
  if (n <= kExactFactorialLimit) return exact_log_factorials()[n];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

LogScalar poisson_pmf(double mu, std::uint64_t k) {
  require_intensity(mu);
  if (mu == 0.0) return k == 0 ? LogScalar::one() : LogScalar::zero();
  return LogScalar::from_log(-mu + static_cast<double>(k) * std::log(mu) -
                             log_factorial(k));
}

LogScalar pseudo_photon_prob(const PseudoPhotonSpec& spec) {
  spec.validate();
  const double mu = spec.mu;
  if (mu == 0.0) return spec.k == 0 ? LogScalar::one() : LogScalar::zero();
  const double ln_mu = std::log(mu);
  return log_series(mu, spec.k, spec.m, [&](std::uint64_t n) {
    return -mu + static_cast<double>(n) * ln_mu - log_factorial(n);
  });
}

LogScalar prob_excess_delta(const PseudoPhotonSpec& spec) {
  spec.validate();
  const double mu = spec.mu;
  if (mu == 0.0) return LogScalar::zero();
  const double ln_mu = std::log(mu);
  const double ln_k_fact = log_factorial(spec.k);
  // n runs over lm + k for l >= 1; mu^(lm) = mu^(n - k).
  return log_series(mu, std::uint64_t{spec.m} + spec.k, spec.m,
                    [&](std::uint64_t n) {
                      return static_cast<double>(n - spec.k) * ln_mu +
                             ln_k_fact - log_factorial(n);
                    });
}

LogScalar trace_distance_pseudo_fock(const PseudoPhotonSpec& spec) {
  const LogScalar delta = prob_excess_delta(spec);
  if (delta.is_zero()) return LogScalar::zero();
  // D^2 = delta / (1 + delta)
  return LogScalar::from_log(0.5 * (delta.ln() - log1p(delta)));
}

LogScalar secrecy_epsilon(double mu, std::uint32_t m) {
  require_intensity(mu);
  if (m < 100) {
    throw DomainError(
        "secrecy_epsilon assumes a large phase count (m >= 100); got m = " +
        std::to_string(m));
  }
  if (mu == 0.0) return LogScalar::zero();
  return LogScalar::from_log(-mu + static_cast<double>(m) * std::log(mu) -
                             log_factorial(m) - std::numbers::ln2);
}

double phase_pdf(double mu, double theta, double x) {
  require_intensity(mu);
  return phase_pdf_from_amplitudes(coherent_amplitudes(mu), x - theta);
}

double avg_phase_pdf(double mu, std::uint32_t m, double x) {
  require_intensity(mu);
  if (m < 1) throw DomainError("phase count m must be >= 1");
  const auto amp = coherent_amplitudes(mu);
  double acc = 0.0;
  for (std::uint32_t j = 0; j < m; ++j) {
    const double theta = kTwoPi * static_cast<double>(j) / m;
    acc += phase_pdf_from_amplitudes(amp, x - theta);
  }
  return acc / m;
}

UsdProbability usd_probability(double mu, std::uint32_t m) {
  require_intensity(mu);
  if (m < 2) throw DomainError("USD needs at least m = 2 states");

  UsdProbability out;
  if (mu > 0.0) {
    out.approx = LogScalar::from_log(std::log(static_cast<double>(m)) +
                                     (m - 1.0) * std::log(mu) -
                                     log_factorial(m - 1));
  }
  if (m > kUsdExactMaxPhases) return out;

  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  const long double lmu = mu;
  long double best = std::numeric_limits<long double>::infinity();
  long double worst_imag = 0.0L;
  for (std::uint32_t r = 0; r < m; ++r) {
    CompensatedSum sum;
    for (std::uint32_t j = 0; j < m; ++j) {
      const long double a = two_pi * j / m;
      const long double mag = std::exp(lmu * (std::cos(a) - 1.0L));
      const long double ph = lmu * std::sin(a) - a * r;
      sum.add(mag * std::cos(ph), mag * std::sin(ph));
    }
    worst_imag = std::max(worst_imag, std::fabs(sum.im));
    best = std::min(best, sum.re);
  }
  if (worst_imag >= 1e-9L) {
    throw NumericFault("USD sum left an imaginary residue above 1e-9");
  }
  out.exact = static_cast<double>(std::max(best, 0.0L));
  return out;
}

double min_error_probability(double mu, std::uint32_t m) {
  require_intensity(mu);
  if (m < 1) throw DomainError("phase count m must be >= 1");

  std::vector<std::complex<double>> twiddle(m);
  std::vector<std::complex<double>> c(m);
  for (std::uint32_t k = 0; k < m; ++k) {
    const double a = kTwoPi * static_cast<double>(k) / m;
    twiddle[k] = {std::cos(a), std::sin(a)};
    // c_k = exp(-mu (1 - e^{i a}))
    c[k] = std::exp(mu * (std::cos(a) - 1.0)) *
           std::complex<double>{std::cos(mu * std::sin(a)),
                                std::sin(mu * std::sin(a))};
  }

  std::vector<std::complex<double>> lambda(m);
  for (std::uint32_t r = 0; r < m; ++r) {
    std::complex<double> acc{0.0, 0.0};
    std::uint64_t idx = 0;
    for (std::uint32_t k = 0; k < m; ++k) {
      acc += c[k] * twiddle[idx];
      idx += r;
      if (idx >= m) idx -= m;
    }
    lambda[r] = acc;
  }

  double largest = 0.0;
  for (const auto& l : lambda) largest = std::max(largest, l.real());
  double root_sum = 0.0;
  for (const auto& l : lambda) {
    if (std::fabs(l.imag()) >= 1e-9 * largest) {
      throw NumericFault("Gram eigenvalue has imaginary residue above 1e-9");
    }
    root_sum += std::sqrt(std::max(l.real(), 0.0));
  }
  const double md = static_cast<double>(m);
  return 1.0 - root_sum * root_sum / (md * md);
}

double bessel_i0(double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw DomainError("bessel_i0 requires finite x >= 0");
  }
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 10'000; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-15 * sum) break;
  }
  return sum;
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("binary_entropy requires 0 <= x <= 1");
  }
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

AnalysisReport analyze(double mu, std::uint32_t m) {
  AnalysisReport rep;
  rep.mu = mu;
  rep.m = m;
  const auto usd = usd_probability(mu, m);
  rep.p_usd = usd.approx;
  rep.p_usd_exact = usd.exact;
  rep.p_min = min_error_probability(mu, m);
  const PseudoPhotonSpec vacuum{mu, m, 0};
  rep.delta_k0 = prob_excess_delta(vacuum);
  rep.trace_distance_k0 = trace_distance_pseudo_fock(vacuum);
  if (m >= 100) rep.secrecy_epsilon = secrecy_epsilon(mu, m);
  rep.random_guess_error = 1.0 - 1.0 / static_cast<double>(m);
  return rep;
}

}  // namespace pkd::coherent
