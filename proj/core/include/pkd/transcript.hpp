#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "pkd/session.hpp"

namespace pkd::session {

inline constexpr int kTranscriptVersion = 1;

/// Public-channel record of a session as compact JSON: config echo,
/// announcements, ciphertexts and tag as hex (LSB-first within each byte),
/// lengths, and the key ledger. Holds no secret key material.
std::string render_transcript(const SessionConfig& cfg,
                              const SessionReport& report);

std::uint64_t fnv1a64(std::string_view bytes);
/// 16 lowercase hex digits.
std::string digest_hex(std::uint64_t digest);

}  // namespace pkd::session
