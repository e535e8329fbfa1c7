#pragma once

#include <cstddef>

#include "pkd/bit_string.hpp"

/// GF(2) products with Toeplitz matrices defined by an explicit seed.
///
/// A seed h_0 .. h_{rows+cols-2} defines the rows x cols matrix
///
///     H[i][j] = h_{(rows-1) + j - i}
///
/// i.e. the top-right entry is h_{rows+cols-2} and the bottom-left h_0.
namespace pkd::toeplitz {

struct ToeplitzSeed {
  BitString bits;
  std::size_t rows = 0;
  std::size_t cols = 0;

  /// Throws LengthMismatch unless bits.size() == rows + cols - 1 (or 0 when
  /// the matrix is empty).
  ToeplitzSeed(BitString bits, std::size_t rows, std::size_t cols);

  [[nodiscard]] static std::size_t seed_length(std::size_t rows,
                                               std::size_t cols) {
    return rows == 0 || cols == 0 ? 0 : rows + cols - 1;
  }
  [[nodiscard]] bool entry(std::size_t i, std::size_t j) const {
    return bits.get(rows - 1 + j - i);
  }
};

/// Row vector times matrix: d_j = XOR_i v_i h_{rows+j-i-1}, j < cols.
/// `v` must have `rows` bits. Word-packed shift-and-XOR.
BitString toeplitz_product(const ToeplitzSeed& seed, const BitString& v);

/// Matrix times column vector: out_i = XOR_j H[i][j] v_j, i < rows.
/// `v` must have `cols` bits.
BitString compress(const ToeplitzSeed& seed, const BitString& v);

/// OTP-masked universal hash tag: compress(seed, message) XOR otp.
BitString mac_tag(const ToeplitzSeed& seed, const BitString& otp,
                  const BitString& message);
bool mac_verify(const ToeplitzSeed& seed, const BitString& otp,
                const BitString& message, const BitString& tag);

/// Bit-at-a-time definitions. They are the normative semantics the packed
/// routines above must reproduce.
namespace reference {
BitString toeplitz_product(const ToeplitzSeed& seed, const BitString& v);
BitString compress(const ToeplitzSeed& seed, const BitString& v);
}  // namespace reference

}  // namespace pkd::toeplitz
