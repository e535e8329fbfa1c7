#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

/// Small truncated-Fock checks of the virtual two-qubit state: per photon
/// number k the X-basis parity of qubits A and B is (-1)^k for every phase
/// difference.
namespace pkd::entanglement {

using Complex = std::complex<double>;
using StateVector = std::vector<Complex>;
/// Two-qubit density matrix in the basis |qA qB>, index 2*qA + qB with
/// q = 0 for +z and 1 for -z.
using QubitMatrix = std::array<std::array<Complex, 4>, 4>;

enum class ModeSign { plus, minus };

/// (a^dag +- e^{i dtheta} b^dag)^k |00> / sqrt(2^k k!) over the basis
/// |j, k-j>, j = 0..k.
StateVector kphoton_mode_state(unsigned k, ModeSign sign, double delta_theta);

struct JointState {
  unsigned k = 0;
  double delta_theta = 0.0;
  /// Dimension 4(k+1), indexed by index(qA, qB, j).
  StateVector amplitudes;

  [[nodiscard]] std::size_t index(unsigned qa, unsigned qb, unsigned j) const {
    return (qa * 2 + qb) * (k + 1) + j;
  }
};

/// (|B1>|+dtheta>^k + |B2>|-dtheta>^k), normalized, with (B1, B2) =
/// (phi-, psi-) for odd k and (phi+, psi+) for even k.
JointState build_rho_k_state(unsigned k, double delta_theta);

/// Partial trace over the optical modes.
QubitMatrix reduced_qubit_state(const JointState& state);

/// <X (x) X> on the reduced two-qubit state.
double x_basis_parity(const JointState& state);

/// Probability that Z-basis outcomes of A and B agree.
double z_basis_agreement(const JointState& state);

/// max over the grid of (1 - |parity|) / 2. Throws DomainError for an empty
/// grid or odd m (photon-number parity is then not fixed by k).
double phase_error_rate(std::span<const unsigned> ks,
                        std::span<const double> delta_thetas,
                        std::uint32_t m = 1024);

}  // namespace pkd::entanglement
