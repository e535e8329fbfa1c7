#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pkd/bit_string.hpp"
#include "pkd/optics_sim.hpp"
#include "pkd/random_stream.hpp"
#include "pkd/toeplitz.hpp"

namespace pkd::session {

/// The modeled pre-shared pool cannot cover a draw. Thrown before any round
/// is simulated when the fixed per-session costs do not fit.
class InsufficientKeyPool : public std::runtime_error {
 public:
  InsufficientKeyPool(std::uint64_t needed, std::uint64_t available);
  [[nodiscard]] std::uint64_t needed() const { return needed_; }
  [[nodiscard]] std::uint64_t available() const { return available_; }

 private:
  std::uint64_t needed_;
  std::uint64_t available_;
};

/// Alice's phase bits do not fit in the t-bit negotiation pad.
class NegotiationOverflow : public std::runtime_error {
 public:
  NegotiationOverflow(std::uint64_t phase_bits, std::uint64_t t);
  [[nodiscard]] std::uint64_t phase_bits() const { return phase_bits_; }
  [[nodiscard]] std::uint64_t t() const { return t_; }

 private:
  std::uint64_t phase_bits_;
  std::uint64_t t_;
};

struct AccountingFlags {
  /// Charge the verification one-time pad against the net rate.
  bool count_verification_key = false;
  /// Draw the privacy-amplification seed from the pool and charge it.
  bool count_pa_seed = false;
};

struct SessionConfig {
  std::uint64_t N = 1'000'000;
  std::uint32_t m = 1024;
  optics::OpticsParams optics;
  double f = 1.05;
  double eps_cor = 1e-15;
  double eps_sec = 1e-10;
  /// Length of the per-session update key K_upd.
  std::size_t s = 10'000;
  /// Negotiation pad length; sized from the expected event count if unset.
  std::optional<std::size_t> t;
  std::uint64_t master_seed = 0;
  AccountingFlags accounting;
  /// Capacity of the pre-shared pool in bits; unbounded if unset.
  std::optional<std::uint64_t> key_pool_bits;
  /// Worker threads for round simulation (0 = hardware concurrency).
  unsigned workers = 0;
  /// Test hook: flips one bit of Bob's reconciled key so verification fails.
  bool corrupt_reconciliation = false;

  /// Throws ConfigError on out-of-range values, including an explicit t
  /// below the 5-sigma margin.
  void validate() const;
  /// max(ceil(1.05 E[n] w), ceil((E[n] + 5 sigma) w), 1) with w = log2 m.
  [[nodiscard]] std::size_t default_t() const;
  /// Smallest t accepted: ceil((E[n] + 5 sigma) w).
  [[nodiscard]] std::size_t min_t() const;
  [[nodiscard]] std::size_t resolved_t() const { return t ? *t : default_t(); }
};

/// Pre-shared secret bits, drawn in order from a deterministic stream and
/// counted against an optional capacity.
class KeyPool {
 public:
  KeyPool(std::uint64_t master_seed, std::optional<std::uint64_t> capacity);

  /// Throws InsufficientKeyPool if fewer than `bits` remain.
  BitString draw(std::size_t bits);
  [[nodiscard]] bool can_draw(std::uint64_t bits) const;
  [[nodiscard]] std::uint64_t consumed() const { return consumed_; }
  [[nodiscard]] std::optional<std::uint64_t> remaining() const;
  [[nodiscard]] std::optional<std::uint64_t> capacity() const { return capacity_; }

 private:
  RandomStream stream_;
  std::optional<std::uint64_t> capacity_;
  std::uint64_t consumed_ = 0;
};

struct KeyLedger {
  std::uint64_t consumed_mapping_otp = 0;
  std::uint64_t consumed_k_upd = 0;
  std::uint64_t consumed_verification = 0;
  std::uint64_t consumed_pa_seed = 0;
  std::uint64_t produced_ell = 0;
  std::int64_t net_R = 0;

  [[nodiscard]] std::uint64_t total_consumed() const {
    return consumed_mapping_otp + consumed_k_upd + consumed_verification +
           consumed_pa_seed;
  }
  friend bool operator==(const KeyLedger&, const KeyLedger&) = default;
};

/// One party's public announcement of a successful event.
struct Announcement {
  std::uint64_t round = 0;
  optics::Detector detector = optics::Detector::left;
  friend bool operator==(const Announcement&, const Announcement&) = default;
};

/// Everything sent over the public channel during a session.
struct PublicMessages {
  std::vector<Announcement> alice;
  std::vector<Announcement> bob;
  BitString rule_ciphertext;
  BitString negotiation_ciphertext;
  BitString tag;
  friend bool operator==(const PublicMessages&, const PublicMessages&) = default;
};

struct SessionReport {
  std::uint64_t n_alice = 0;
  std::uint64_t n_bob = 0;
  std::uint64_t n_matched = 0;
  std::size_t t = 0;
  double E_emp = 0.0;
  std::uint64_t lambda = 0;
  std::size_t tag_length = 0;
  bool verification_passed = false;
  std::uint64_t ell = 0;
  std::size_t pa_seed_length = 0;
  KeyLedger ledger;
  PublicMessages messages;
  /// FNV-1a 64 of the rendered transcript, as 16 hex digits.
  std::string transcript_digest;
  BitString key_alice;
  BitString key_bob;

  friend bool operator==(const SessionReport&, const SessionReport&) = default;
};

/// Runs one full session end to end. Deterministic in cfg.
SessionReport run_session(const SessionConfig& cfg);

struct EventPair {
  optics::DetectionEvent alice;
  optics::DetectionEvent bob;
};

/// Pairs events sharing a phase index. Within each phase bucket the k-th
/// Alice event is paired with the k-th Bob event; surplus events are dropped.
/// Output follows Alice's arrival order.
std::vector<EventPair> pair_events(const std::vector<optics::DetectionEvent>& alice,
                                   const std::vector<optics::DetectionEvent>& bob);

/// phase_bits XOR the first |phase_bits| bits of K_upd * H.
BitString negotiate_phases(const toeplitz::ToeplitzSeed& seed,
                           const BitString& k_upd, const BitString& phase_bits);
/// Receiving side of negotiate_phases.
BitString recover_phases(const toeplitz::ToeplitzSeed& seed,
                         const BitString& k_upd, const BitString& ciphertext);

struct RawKeys {
  BitString z_a;
  BitString z_b;
};

/// Alice keeps r_a; Bob keeps r_b, flipped when the detectors differ.
RawKeys sift_and_flip(const std::vector<EventPair>& pairs);

struct Reconciliation {
  BitString corrected;
  double error_rate = 0.0;
  std::uint64_t lambda = 0;
};

/// Disclosure model: Bob receives Alice's string; lambda = ceil(n f h(E)).
Reconciliation error_correct(const BitString& z_a, const BitString& z_b,
                             double f);

/// ceil(log2(2 / eps_cor)).
std::size_t tag_length(double eps_cor);

struct Verification {
  bool passed = false;
  BitString tag;
};

/// Alice publishes mac_tag(z_a) under `mac_seed` (tag_length rows, |z_a|
/// columns) and a one-time pad drawn from `pool`; Bob checks it against z_b.
Verification verify_keys(const BitString& z_a, const BitString& z_b,
                         double eps_cor, const toeplitz::ToeplitzSeed& mac_seed,
                         KeyPool& pool);

/// max(0, floor(n - n f h(E) - log2(2/eps_cor) - 2 log2(3/(2 eps_sec)))).
std::uint64_t key_length(std::uint64_t n, double E, double f, double eps_cor,
                         double eps_sec);

BitString privacy_amplify(const BitString& z, std::uint64_t ell,
                          const BitString& pa_seed);

/// ell - s - m log2 m, less the tag and PA seed when flagged.
std::int64_t net_rate(const SessionReport& report, const SessionConfig& cfg);

}  // namespace pkd::session
