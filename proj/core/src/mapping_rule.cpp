#include "pkd/mapping_rule.hpp"

#include <bit>
#include <numbers>
#include <limits>
#include <string>

#include "pkd/coherent_math.hpp"
#include "pkd/errors.hpp"

namespace pkd {

namespace {
constexpr std::uint32_t kUnassigned = std::numeric_limits<std::uint32_t>::max();
}

EntropyExhausted::EntropyExhausted(std::size_t distinct_found,
                                   std::size_t needed)
    : std::runtime_error("entropy stream exhausted after " +
                         std::to_string(distinct_found) + " of " +
                         std::to_string(needed) + " substring values"),
      found_(distinct_found),
      needed_(needed) {}

bool is_phase_count_valid(std::uint32_t m) {
  return m >= 2 && std::has_single_bit(m);
}

unsigned phase_bits(std::uint32_t m) {
  if (!is_phase_count_valid(m)) {
    throw ConfigError("phase count m must be a power of two >= 2; got " +
                      std::to_string(m));
  }
  return static_cast<unsigned>(std::countr_zero(m));
}

MappingRule::MappingRule(std::vector<std::uint32_t> forward)
    : forward_(std::move(forward)) {
  const auto m = static_cast<std::uint32_t>(forward_.size());
  bits_ = phase_bits(m);
  inverse_.assign(m, kUnassigned);
  for (std::uint32_t j = 0; j < m; ++j) {
    const std::uint32_t c = forward_[j];
    if (c >= m || inverse_[c] != kUnassigned) {
      throw MalformedRule("mapping table is not a permutation (substring " +
                          std::to_string(c) + " at phase " +
                          std::to_string(j) + ")");
    }
    inverse_[c] = j;
  }
}

MappingRule MappingRule::identity(std::uint32_t m) {
  std::vector<std::uint32_t> f(m);
  for (std::uint32_t j = 0; j < m; ++j) f[j] = j;
  return MappingRule(std::move(f));
}

std::uint32_t MappingRule::phase_index_of(const BitString& x) const {
  if (x.size() != bits_) {
    throw LengthMismatch("substring must have log2(m) = " +
                         std::to_string(bits_) + " bits");
  }
  return phase_index_of(static_cast<std::uint32_t>(x.read_uint(0, bits_)));
}

BitString MappingRule::substring_of(std::uint32_t j) const {
  return BitString::from_uint(forward_.at(j), bits_);
}

BitString MappingRule::serialize() const {
  BitString out;
  for (std::uint32_t c : forward_) out.append_uint(c, bits_);
  return out;
}

std::vector<std::uint8_t> MappingRule::to_bytes() const {
  return serialize().to_bytes(BitOrder::msb_first);
}

MappingRule MappingRule::deserialize(const BitString& bits, std::uint32_t m) {
  const unsigned w = phase_bits(m);
  if (bits.size() != std::size_t{m} * w) {
    throw LengthMismatch("serialized rule must have m*log2(m) bits");
  }
  std::vector<std::uint32_t> f(m);
  for (std::uint32_t j = 0; j < m; ++j) {
    f[j] = static_cast<std::uint32_t>(bits.read_uint(std::size_t{j} * w, w));
  }
  return MappingRule(std::move(f));
}

MappingRule generate_rule(const BitString& entropy, std::uint32_t m) {
  const unsigned w = phase_bits(m);
  if (entropy.size() % w != 0) {
    throw LengthMismatch("entropy length must be a multiple of log2(m)");
  }
  std::vector<bool> seen(m, false);
  std::vector<std::uint32_t> forward;
  forward.reserve(m);
  for (std::size_t pos = 0; pos < entropy.size() && forward.size() < m;
       pos += w) {
    const auto c = static_cast<std::uint32_t>(entropy.read_uint(pos, w));
    if (seen[c]) continue;
    seen[c] = true;
    forward.push_back(c);
  }
  if (forward.size() < m) throw EntropyExhausted(forward.size(), m);
  return MappingRule(std::move(forward));
}

BitString otp_encrypt_rule(const MappingRule& rule, const BitString& key) {
  BitString plain = rule.serialize();
  if (key.size() != plain.size()) {
    throw LengthMismatch("rule one-time pad must be m*log2(m) bits");
  }
  return plain ^ key;
}

MappingRule otp_decrypt_rule(const BitString& ciphertext, const BitString& key,
                             std::uint32_t m) {
  if (key.size() != ciphertext.size()) {
    throw LengthMismatch("rule one-time pad must match the ciphertext length");
  }
  return MappingRule::deserialize(ciphertext ^ key, m);
}

RuleKeyCost rule_key_cost(std::uint32_t m) {
  const unsigned w = phase_bits(m);
  return {std::uint64_t{m} * w, coherent::log_factorial(m) / std::numbers::ln2};
}

}  // namespace pkd
