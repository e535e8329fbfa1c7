#include "pkd/bit_string.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <stdexcept>
#include <string>

#include "pkd/errors.hpp"

namespace pkd {

BitString::BitString(std::size_t size)
    : words_(words_for_bits(size), 0), size_(size) {}

BitString BitString::from_string(std::string_view text) {
  BitString out;
  for (char c : text) {
    if (c == '0' || c == '1') {
      out.push_back(c == '1');
    } else if (c != ' ' && c != '_') {
      throw std::invalid_argument(std::string("invalid bit character '") + c +
                                  "'");
    }
  }
  return out;
}

BitString BitString::from_uint(std::uint64_t value, unsigned width) {
  BitString out;
  out.append_uint(value, width);
  return out;
}

BitString BitString::from_bytes(std::span<const std::uint8_t> bytes,
                                std::size_t size, BitOrder order) {
  if (bytes.size() * 8 < size) {
    throw LengthMismatch("not enough bytes for the requested bit count");
  }
  BitString out(size);
  for (std::size_t i = 0; i < size; ++i) {
    const unsigned shift = order == BitOrder::msb_first ? 7 - (i & 7) : (i & 7);
    out.set(i, (bytes[i >> 3] >> shift) & 1U);
  }
  return out;
}

void BitString::push_back(bool value) {
  if ((size_ & 63) == 0) words_.push_back(0);
  ++size_;
  if (value) set(size_ - 1, true);
}

void BitString::append(const BitString& other) {
  const std::size_t old = size_;
  resize(size_ + other.size_);
  if ((old & 63) == 0) {
    std::copy(other.words_.begin(), other.words_.end(),
              words_.begin() + static_cast<std::ptrdiff_t>(old >> 6));
    return;
  }
  const unsigned shift = old & 63;
  std::size_t w = old >> 6;
  for (std::uint64_t word : other.words_) {
    words_[w] |= word << shift;
    if (w + 1 < words_.size()) words_[w + 1] |= word >> (64 - shift);
    ++w;
  }
  clear_tail();
}

void BitString::append_uint(std::uint64_t value, unsigned width) {
  for (unsigned b = width; b-- > 0;) push_back((value >> b) & 1U);
}

void BitString::resize(std::size_t size) {
  words_.resize(words_for_bits(size), 0);
  size_ = size;
  clear_tail();
}

std::uint64_t BitString::read_uint(std::size_t pos, unsigned width) const {
  if (width > 64 || pos + width > size_) {
    throw LengthMismatch("read_uint out of range");
  }
  std::uint64_t v = 0;
  for (unsigned b = 0; b < width; ++b) v = (v << 1) | (get(pos + b) ? 1U : 0U);
  return v;
}

BitString BitString::slice(std::size_t pos, std::size_t len) const {
  if (pos + len > size_) throw LengthMismatch("slice out of range");
  BitString out(len);
  for (std::size_t w = 0; w < out.words_.size(); ++w) {
    out.words_[w] = window(pos + 64 * w);
  }
  out.clear_tail();
  return out;
}

std::uint64_t BitString::window(std::size_t pos) const {
  const std::size_t w = pos >> 6;
  const unsigned shift = pos & 63;
  if (w >= words_.size()) return 0;
  std::uint64_t lo = words_[w] >> shift;
  if (shift != 0 && w + 1 < words_.size()) lo |= words_[w + 1] << (64 - shift);
  return lo;
}

std::size_t BitString::count() const {
  std::size_t c = 0;
  for (std::uint64_t w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

BitString& BitString::operator^=(const BitString& rhs) {
  if (rhs.size_ != size_) {
    throw LengthMismatch("XOR of bit strings with different lengths (" +
                         std::to_string(size_) + " vs " +
                         std::to_string(rhs.size_) + ")");
  }
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= rhs.words_[i];
  return *this;
}

std::string BitString::to_string() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i) {
    if (get(i)) s[i] = '1';
  }
  return s;
}

std::vector<std::uint8_t> BitString::to_bytes(BitOrder order) const {
  std::vector<std::uint8_t> bytes((size_ + 7) / 8, 0);
  for (std::size_t i = 0; i < size_; ++i) {
    if (!get(i)) continue;
    const unsigned shift = order == BitOrder::msb_first ? 7 - (i & 7) : (i & 7);
    bytes[i >> 3] |= static_cast<std::uint8_t>(1U << shift);
  }
  return bytes;
}

std::string BitString::to_hex(BitOrder order) const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (std::uint8_t b : to_bytes(order)) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 15]);
  }
  return out;
}

BitString BitString::from_hex(std::string_view hex, std::size_t size,
                              BitOrder order) {
  if (hex.size() % 2 != 0) throw std::invalid_argument("odd-length hex string");
  auto nibble = [](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    throw std::invalid_argument("invalid hex digit");
  };
  std::vector<std::uint8_t> bytes;
  bytes.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    bytes.push_back(static_cast<std::uint8_t>(nibble(hex[i]) << 4 |
                                              nibble(hex[i + 1])));
  }
  return from_bytes(bytes, size, order);
}

void BitString::clear_tail() {
  if ((size_ & 63) != 0 && !words_.empty()) {
    words_.back() &= (std::uint64_t{1} << (size_ & 63)) - 1;
  }
}

}  // namespace pkd
