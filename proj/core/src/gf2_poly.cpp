#include "gf2_poly.hpp"

#include <algorithm>
#include <array>

namespace pkd::gf2 {

namespace {

constexpr std::size_t kSchoolbookWords = 24;

void schoolbook(const std::uint64_t* a, const std::uint64_t* b, std::size_t n,
                std::uint64_t* out) {
  std::fill(out, out + 2 * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const Wide p = clmul(a[i], b[j]);
      out[i + j] ^= p.lo;
      out[i + j + 1] ^= p.hi;
    }
  }
}

// out (2n words) = a (n) * b (n); scratch must hold 4n words.
void karatsuba(const std::uint64_t* a, const std::uint64_t* b, std::size_t n,
               std::uint64_t* out, std::uint64_t* scratch) {
  if (n <= kSchoolbookWords) {
    schoolbook(a, b, n, out);
    return;
  }
  const std::size_t lo = n / 2;
  const std::size_t hi = n - lo;  // hi >= lo

  // z0 -> out[0, 2lo), z2 -> out[2lo, 2n)
  karatsuba(a, b, lo, out, scratch);
  karatsuba(a + lo, b + lo, hi, out + 2 * lo, scratch);

  std::uint64_t* sa = scratch;
  std::uint64_t* sb = scratch + hi;
  std::uint64_t* z1 = scratch + 2 * hi;
  std::uint64_t* deeper = scratch + 4 * hi;
  for (std::size_t i = 0; i < hi; ++i) {
    sa[i] = a[lo + i] ^ (i < lo ? a[i] : 0);
    sb[i] = b[lo + i] ^ (i < lo ? b[i] : 0);
  }
  karatsuba(sa, sb, hi, z1, deeper);
  for (std::size_t i = 0; i < 2 * lo; ++i) z1[i] ^= out[i];
  for (std::size_t i = 0; i < 2 * hi; ++i) z1[i] ^= out[2 * lo + i];
  for (std::size_t i = 0; i < 2 * hi; ++i) out[lo + i] ^= z1[i];
}

std::size_t scratch_words(std::size_t n) {
  // Each level needs 4*hi words and recurses on hi = ceil(n/2).
  std::size_t total = 0;
  while (n > kSchoolbookWords) {
    const std::size_t hi = n - n / 2;
    total += 4 * hi;
    n = hi;
  }
  return total + 8;
}

}  // namespace

Wide clmul(std::uint64_t a, std::uint64_t b) {
  __extension__ typedef unsigned __int128 u128;
  // 4-bit windowed shift-and-xor; table[i] = a * i over GF(2).
  std::array<u128, 16> table{};
  for (unsigned i = 1; i < 16; ++i) {
    const unsigned low = i & (i - 1);
    const unsigned shift = static_cast<unsigned>(__builtin_ctz(i));
    table[i] = table[low] ^ (static_cast<u128>(a) << shift);
  }
  u128 acc = 0;
  for (int nib = 15; nib >= 0; --nib) {
    acc = (acc << 4) ^ table[(b >> (4 * nib)) & 15];
  }
  return {static_cast<std::uint64_t>(acc), static_cast<std::uint64_t>(acc >> 64)};
}

std::vector<std::uint64_t> multiply(std::span<const std::uint64_t> a,
                                    std::span<const std::uint64_t> b) {
  const std::size_t n = std::max(a.size(), b.size());
  std::vector<std::uint64_t> out(a.size() + b.size(), 0);
  if (a.empty() || b.empty()) return out;
  std::vector<std::uint64_t> pa(n, 0), pb(n, 0);
  std::copy(a.begin(), a.end(), pa.begin());
  std::copy(b.begin(), b.end(), pb.begin());
  std::vector<std::uint64_t> full(2 * n, 0);
  std::vector<std::uint64_t> scratch(scratch_words(n), 0);
  karatsuba(pa.data(), pb.data(), n, full.data(), scratch.data());
  std::copy(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(out.size()),
            out.begin());
  return out;
}

}  // namespace pkd::gf2
