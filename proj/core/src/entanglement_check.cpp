#include "pkd/entanglement_check.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pkd/coherent_math.hpp"
#include "pkd/errors.hpp"

namespace pkd::entanglement {

namespace {

double binomial(unsigned k, unsigned j) {
  return std::exp(coherent::log_factorial(k) - coherent::log_factorial(j) -
                  coherent::log_factorial(k - j));
}

// Bell amplitudes over |qA qB>.
std::array<Complex, 4> bell(bool phi, bool minus) {
  const double h = std::numbers::sqrt2 / 2.0;
  const double s = minus ? -h : h;
  if (phi) return {h, 0.0, 0.0, s};
  return {0.0, h, s, 0.0};
}

}  // namespace

StateVector kphoton_mode_state(unsigned k, ModeSign sign, double delta_theta) {
  StateVector out(k + 1);
  const Complex phase =
      std::polar(sign == ModeSign::plus ? 1.0 : -1.0, delta_theta);
  const double scale = std::pow(2.0, -static_cast<double>(k));
  for (unsigned j = 0; j <= k; ++j) {
    out[j] = std::sqrt(binomial(k, j) * scale) * std::pow(phase, static_cast<int>(k - j));
  }
  return out;
}

JointState build_rho_k_state(unsigned k, double delta_theta) {
  const bool odd = (k % 2) == 1;
  const auto b1 = bell(true, odd);
  const auto b2 = bell(false, odd);
  const StateVector plus = kphoton_mode_state(k, ModeSign::plus, delta_theta);
  const StateVector minus = kphoton_mode_state(k, ModeSign::minus, delta_theta);

  JointState st{k, delta_theta, StateVector(4 * (k + 1))};
  for (unsigned q = 0; q < 4; ++q) {
    for (unsigned j = 0; j <= k; ++j) {
      st.amplitudes[st.index(q / 2, q % 2, j)] = b1[q] * plus[j] + b2[q] * minus[j];
    }
  }
  double norm = 0.0;
  for (const auto& a : st.amplitudes) norm += std::norm(a);
  norm = std::sqrt(norm);
  for (auto& a : st.amplitudes) a /= norm;
  return st;
}

QubitMatrix reduced_qubit_state(const JointState& state) {
  QubitMatrix rho{};
  const unsigned dim = state.k + 1;
  for (unsigned r = 0; r < 4; ++r) {
    for (unsigned c = 0; c < 4; ++c) {
      Complex acc = 0.0;
      for (unsigned j = 0; j < dim; ++j) {
        acc += state.amplitudes[r * dim + j] * std::conj(state.amplitudes[c * dim + j]);
      }
      rho[r][c] = acc;
    }
  }
  return rho;
}

double x_basis_parity(const JointState& state) {
  const QubitMatrix rho = reduced_qubit_state(state);
  double acc = 0.0;
  for (unsigned ab = 0; ab < 4; ++ab) acc += rho[ab][3 - ab].real();
  return acc;
}

double z_basis_agreement(const JointState& state) {
  const QubitMatrix rho = reduced_qubit_state(state);
  return rho[0][0].real() + rho[3][3].real();
}

double phase_error_rate(std::span<const unsigned> ks,
                        std::span<const double> delta_thetas, std::uint32_t m) {
  if (ks.empty() || delta_thetas.empty()) {
    throw DomainError("phase error grid must be nonempty");
  }
  if (m % 2 != 0) {
    throw DomainError("odd phase count m: photon-number parity is not fixed by k");
  }
  double worst = 0.0;
  for (const unsigned k : ks) {
    for (const double dt : delta_thetas) {
      const double parity = x_basis_parity(build_rho_k_state(k, dt));
      worst = std::max(worst, (1.0 - std::abs(parity)) / 2.0);
    }
  }
  return worst;
}

}  // namespace pkd::entanglement
