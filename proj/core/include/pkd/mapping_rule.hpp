#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pkd/bit_string.hpp"

namespace pkd {

/// The entropy stream ended before every substring value appeared. The
/// caller may extend the stream and retry.
class EntropyExhausted : public std::runtime_error {
 public:
  EntropyExhausted(std::size_t distinct_found, std::size_t needed);
  [[nodiscard]] std::size_t distinct_found() const { return found_; }
  [[nodiscard]] std::size_t needed() const { return needed_; }

 private:
  std::size_t found_;
  std::size_t needed_;
};

/// A decrypted or deserialized table is not a permutation.
class MalformedRule : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// True for m = 2, 4, 8, ...
bool is_phase_count_valid(std::uint32_t m);
/// log2(m) for a valid phase count; throws ConfigError otherwise.
unsigned phase_bits(std::uint32_t m);

/// Per-session bijection between the m discrete phases and log2(m)-bit
/// substrings. forward[j] is the substring value c_j assigned to phase
/// 2*pi*j/m; substrings are read most significant bit first.
class MappingRule {
 public:
  /// Throws MalformedRule unless `forward` is a permutation of 0..m-1, and
  /// ConfigError unless m is a power of two >= 2.
  explicit MappingRule(std::vector<std::uint32_t> forward);

  /// forward[j] = j.
  static MappingRule identity(std::uint32_t m);

  [[nodiscard]] std::uint32_t m() const {
    return static_cast<std::uint32_t>(forward_.size());
  }
  [[nodiscard]] unsigned bits_per_phase() const { return bits_; }
  [[nodiscard]] const std::vector<std::uint32_t>& forward() const {
    return forward_;
  }

  [[nodiscard]] std::uint32_t phase_index_of(std::uint32_t substring) const {
    return inverse_[substring];
  }
  /// `x` must hold exactly log2(m) bits.
  [[nodiscard]] std::uint32_t phase_index_of(const BitString& x) const;
  [[nodiscard]] std::uint32_t substring_value(std::uint32_t j) const {
    return forward_[j];
  }
  [[nodiscard]] BitString substring_of(std::uint32_t j) const;

  /// c_0 || c_1 || ... || c_{m-1}, each block MSB first.
  [[nodiscard]] BitString serialize() const;
  /// Serialized bits packed MSB-first into bytes, zero padded at the end.
  [[nodiscard]] std::vector<std::uint8_t> to_bytes() const;
  static MappingRule deserialize(const BitString& bits, std::uint32_t m);

  friend bool operator==(const MappingRule& a, const MappingRule& b) {
    return a.forward_ == b.forward_;
  }

 private:
  std::vector<std::uint32_t> forward_;
  std::vector<std::uint32_t> inverse_;
  unsigned bits_ = 0;
};

/// Builds a rule from consecutive log2(m)-bit blocks of `entropy`, assigning
/// each not-yet-seen block value to the next phase in order of first
/// appearance. Throws EntropyExhausted if the stream ends first.
MappingRule generate_rule(const BitString& entropy, std::uint32_t m);

/// Ciphertext of the serialized rule under a one-time pad of m*log2(m) bits.
BitString otp_encrypt_rule(const MappingRule& rule, const BitString& key);
/// Inverse of otp_encrypt_rule(); throws MalformedRule when the decrypted
/// table is not a permutation.
MappingRule otp_decrypt_rule(const BitString& ciphertext, const BitString& key,
                             std::uint32_t m);

struct RuleKeyCost {
  /// Pre-shared bits spent on the one-time pad, m*log2(m).
  std::uint64_t bits = 0;
  /// Information content of a uniformly random rule, log2(m!).
  double log2_rule_count = 0.0;
};

RuleKeyCost rule_key_cost(std::uint32_t m);

}  // namespace pkd
