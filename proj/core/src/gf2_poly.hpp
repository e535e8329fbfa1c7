#pragma once

#include <cstdint>
#include <span>
#include <vector>

// Polynomials over GF(2) packed into 64-bit words; bit k of the packed array
// is the coefficient of x^k.
namespace pkd::gf2 {

/// Carry-less product of two words as (low, high).
struct Wide {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
};
Wide clmul(std::uint64_t a, std::uint64_t b);

/// a * b; result has a.size() + b.size() words.
std::vector<std::uint64_t> multiply(std::span<const std::uint64_t> a,
                                    std::span<const std::uint64_t> b);

}  // namespace pkd::gf2
