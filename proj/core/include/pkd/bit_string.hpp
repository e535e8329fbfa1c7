#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pkd {

/// Byte packing order used when a BitString is serialized.
enum class BitOrder {
  /// Bit 0 of the string goes to the most significant bit of byte 0.
  msb_first,
  /// Bit 0 of the string goes to the least significant bit of byte 0.
  lsb_first,
};

/// Packed sequence of bits.
///
/// Storage is little-endian within 64-bit words: bit i lives in word i / 64
/// at position i % 64. Bits past size() in the last word are always zero.
class BitString {
 public:
  BitString() = default;
  /// `size` zero bits.
  explicit BitString(std::size_t size);

  /// Parses '0'/'1' characters; spaces and underscores are ignored.
  static BitString from_string(std::string_view text);
  /// `width` bits of `value`, most significant first.
  static BitString from_uint(std::uint64_t value, unsigned width);
  static BitString from_bytes(std::span<const std::uint8_t> bytes,
                              std::size_t size, BitOrder order);

  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] bool empty() const { return size_ == 0; }

  [[nodiscard]] bool get(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1U;
  }
  void set(std::size_t i, bool value) {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (value) {
      words_[i >> 6] |= mask;
    } else {
      words_[i >> 6] &= ~mask;
    }
  }
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  void push_back(bool value);
  void append(const BitString& other);
  /// Appends `width` bits of `value`, most significant first.
  void append_uint(std::uint64_t value, unsigned width);
  void resize(std::size_t size);

  /// Reads `width` (<= 64) bits starting at `pos`, first bit most significant.
  [[nodiscard]] std::uint64_t read_uint(std::size_t pos, unsigned width) const;
  [[nodiscard]] BitString slice(std::size_t pos, std::size_t len) const;

  /// 64 bits starting at bit `pos`; bits past the end read as zero.
  [[nodiscard]] std::uint64_t window(std::size_t pos) const;

  [[nodiscard]] std::size_t count() const;

  /// Throws LengthMismatch when sizes differ.
  BitString& operator^=(const BitString& rhs);
  friend BitString operator^(BitString a, const BitString& b) {
    return a ^= b;
  }
  friend bool operator==(const BitString&, const BitString&) = default;

  [[nodiscard]] std::span<const std::uint64_t> words() const { return words_; }
  [[nodiscard]] std::span<std::uint64_t> words() { return words_; }

  [[nodiscard]] std::string to_string() const;
  /// Zero-padded to whole bytes at the end.
  [[nodiscard]] std::vector<std::uint8_t> to_bytes(BitOrder order) const;
  [[nodiscard]] std::string to_hex(BitOrder order) const;
  static BitString from_hex(std::string_view hex, std::size_t size,
                            BitOrder order);

 private:
  void clear_tail();

  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

inline constexpr std::size_t words_for_bits(std::size_t bits) {
  return (bits + 63) / 64;
}

}  // namespace pkd
