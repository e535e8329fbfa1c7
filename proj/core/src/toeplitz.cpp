#include "pkd/toeplitz.hpp"

#include <bit>
#include <string>
#include <vector>

#include "gf2_poly.hpp"
#include "pkd/errors.hpp"

namespace pkd::toeplitz {

namespace {

void require_length(const BitString& v, std::size_t expected,
                    const char* what) {
  if (v.size() != expected) {
    throw LengthMismatch(std::string(what) + ": expected " +
                         std::to_string(expected) + " bits, got " +
                         std::to_string(v.size()));
  }
}

BitString reversed(const BitString& v) {
  BitString out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v.get(i)) out.set(v.size() - 1 - i, true);
  }
  return out;
}

}  // namespace

ToeplitzSeed::ToeplitzSeed(BitString seed_bits, std::size_t n_rows,
                           std::size_t n_cols)
    : bits(std::move(seed_bits)), rows(n_rows), cols(n_cols) {
  require_length(bits, seed_length(rows, cols), "Toeplitz seed");
}

BitString toeplitz_product(const ToeplitzSeed& seed, const BitString& v) {
  require_length(v, seed.rows, "Toeplitz product input");
  BitString out(seed.cols);
  if (seed.rows == 0 || seed.cols == 0) return out;

  // Two zero words of padding let the inner loop read word pairs freely.
  std::vector<std::uint64_t> h(seed.bits.words().begin(),
                               seed.bits.words().end());
  h.resize(h.size() + 2, 0);
  auto d = out.words();
  const std::size_t out_words = d.size();

  // d = XOR over set v_i of the seed window starting at rows - 1 - i.
  const auto vw = v.words();
  for (std::size_t w = 0; w < vw.size(); ++w) {
    std::uint64_t bits = vw[w];
    while (bits != 0) {
      const std::size_t i = 64 * w + static_cast<std::size_t>(std::countr_zero(bits));
      bits &= bits - 1;
      const std::size_t offset = seed.rows - 1 - i;
      const std::size_t base = offset >> 6;
      const unsigned shift = offset & 63;
      const std::uint64_t* src = h.data() + base;
      if (shift == 0) {
        for (std::size_t k = 0; k < out_words; ++k) d[k] ^= src[k];
      } else {
        const unsigned back = 64 - shift;
        for (std::size_t k = 0; k < out_words; ++k) {
          d[k] ^= (src[k] >> shift) | (src[k + 1] << back);
        }
      }
    }
  }
  out.resize(seed.cols);  // clears bits past cols
  return out;
}

BitString compress(const ToeplitzSeed& seed, const BitString& v) {
  require_length(v, seed.cols, "Toeplitz compress input");
  BitString out(seed.rows);
  if (seed.rows == 0 || seed.cols == 0) return out;

  // With u = rev(v) and r = rows - 1 - i:
  //   out_i = XOR_j v_j h_{r + j} = coefficient of x^{r + cols - 1} in h(x) u(x).
  const BitString u = reversed(v);
  const auto product = gf2::multiply(seed.bits.words(), u.words());
  const std::size_t first = seed.cols - 1;
  for (std::size_t r = 0; r < seed.rows; ++r) {
    const std::size_t pos = first + r;
    const bool bit = (product[pos >> 6] >> (pos & 63)) & 1U;
    if (bit) out.set(seed.rows - 1 - r, true);
  }
  return out;
}

BitString mac_tag(const ToeplitzSeed& seed, const BitString& otp,
                  const BitString& message) {
  require_length(otp, seed.rows, "MAC one-time pad");
  return compress(seed, message) ^ otp;
}

bool mac_verify(const ToeplitzSeed& seed, const BitString& otp,
                const BitString& message, const BitString& tag) {
  require_length(tag, seed.rows, "MAC tag");
  return mac_tag(seed, otp, message) == tag;
}

namespace reference {

BitString toeplitz_product(const ToeplitzSeed& seed, const BitString& v) {
  require_length(v, seed.rows, "Toeplitz product input");
  BitString out(seed.cols);
  for (std::size_t j = 0; j < seed.cols; ++j) {
    bool d = false;
    for (std::size_t i = 0; i < seed.rows; ++i) {
      d ^= v.get(i) && seed.bits.get(seed.rows + j - i - 1);
    }
    out.set(j, d);
  }
  return out;
}

BitString compress(const ToeplitzSeed& seed, const BitString& v) {
  require_length(v, seed.cols, "Toeplitz compress input");
  BitString out(seed.rows);
  for (std::size_t i = 0; i < seed.rows; ++i) {
    bool acc = false;
    for (std::size_t j = 0; j < seed.cols; ++j) {
      acc ^= seed.entry(i, j) && v.get(j);
    }
    out.set(i, acc);
  }
  return out;
}

}  // namespace reference

}  // namespace pkd::toeplitz
