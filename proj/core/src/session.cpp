#include "pkd/session.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pkd/coherent_math.hpp"
#include "pkd/errors.hpp"
#include "pkd/mapping_rule.hpp"
#include "pkd/transcript.hpp"

namespace pkd::session {

namespace {

struct DetectionStats {
  double mean = 0.0;
  double sigma = 0.0;
};

DetectionStats expected_events(const SessionConfig& cfg) {
  const double p = std::clamp(optics::detection_rate(cfg.optics), 0.0, 1.0);
  const double n = static_cast<double>(cfg.N);
  return {n * p, std::sqrt(n * p * (1.0 - p))};
}

struct PartyEvents {
  std::vector<optics::DetectionEvent> alice;
  std::vector<optics::DetectionEvent> bob;
};

// Rounds for both parties. Each party draws log2(m) phase bits, maps them
// through its copy of the rule, then draws r and the two clicks.
PartyEvents simulate_rounds(const SessionConfig& cfg, const MappingRule& alice_rule,
                            const MappingRule& bob_rule) {
  const ShardPlan plan{cfg.N};
  std::vector<PartyEvents> shards(plan.shard_count());
  const unsigned w = alice_rule.bits_per_phase();
  for_each_shard(plan, cfg.workers, [&](std::uint64_t shard) {
    RandomStream a(cfg.master_seed, StreamPurpose::alice_rounds, shard);
    RandomStream b(cfg.master_seed, StreamPurpose::bob_rounds, shard);
    PartyEvents& out = shards[shard];
    for (std::uint64_t r = plan.begin(shard); r < plan.end(shard); ++r) {
      const auto ja = alice_rule.phase_index_of(static_cast<std::uint32_t>(a.bits(w)));
      const auto ra = static_cast<std::uint8_t>(a.bit());
      if (auto ev = optics::simulate_round(a, cfg.optics, r, ja, cfg.m, ra)) {
        out.alice.push_back(*ev);
      }
      const auto jb = bob_rule.phase_index_of(static_cast<std::uint32_t>(b.bits(w)));
      const auto rb = static_cast<std::uint8_t>(b.bit());
      if (auto ev = optics::simulate_round(b, cfg.optics, r, jb, cfg.m, rb)) {
        out.bob.push_back(*ev);
      }
    }
  });
  PartyEvents all;
  for (auto& s : shards) {
    all.alice.insert(all.alice.end(), s.alice.begin(), s.alice.end());
    all.bob.insert(all.bob.end(), s.bob.begin(), s.bob.end());
  }
  return all;
}

MappingRule draw_rule(const SessionConfig& cfg) {
  RandomStream entropy(cfg.master_seed, StreamPurpose::mapping_entropy);
  const std::size_t block = 10ULL * cfg.m * phase_bits(cfg.m);
  BitString stream = entropy.bit_string(block);
  for (;;) {
    try {
      return generate_rule(stream, cfg.m);
    } catch (const EntropyExhausted&) {
      stream.append(entropy.bit_string(block));
    }
  }
}

std::vector<Announcement> announce(const std::vector<optics::DetectionEvent>& events) {
  std::vector<Announcement> out;
  out.reserve(events.size());
  for (const auto& e : events) out.push_back({e.round, e.detector});
  return out;
}

}  // namespace

InsufficientKeyPool::InsufficientKeyPool(std::uint64_t needed,
                                         std::uint64_t available)
    : std::runtime_error("pre-shared key pool too small: need " +
                         std::to_string(needed) + " bits, " +
                         std::to_string(available) + " available"),
      needed_(needed),
      available_(available) {}

NegotiationOverflow::NegotiationOverflow(std::uint64_t phase_bits,
                                         std::uint64_t t)
    : std::runtime_error("negotiation overflow: " + std::to_string(phase_bits) +
                         " phase bits exceed t = " + std::to_string(t)),
      phase_bits_(phase_bits),
      t_(t) {}

void SessionConfig::validate() const {
  optics.validate();
  if (!is_phase_count_valid(m)) {
    throw ConfigError("m must be a power of two >= 2");
  }
  if (!(f >= 1.0) || !std::isfinite(f)) throw ConfigError("f must be >= 1");
  if (!(eps_cor > 0.0 && eps_cor < 1.0)) {
    throw ConfigError("eps_cor must lie in (0, 1)");
  }
  if (!(eps_sec > 0.0 && eps_sec < 1.0)) {
    throw ConfigError("eps_sec must lie in (0, 1)");
  }
  if (s == 0) throw ConfigError("s must be >= 1");
  if (t) {
    if (*t == 0) throw ConfigError("t must be >= 1");
    if (*t < min_t()) {
      throw ConfigError("t = " + std::to_string(*t) +
                        " leaves less than a 5-sigma margin over the expected "
                        "phase bits; need t >= " + std::to_string(min_t()));
    }
  }
}

std::size_t SessionConfig::min_t() const {
  const auto [mean, sigma] = expected_events(*this);
  return static_cast<std::size_t>(std::ceil((mean + 5.0 * sigma) * phase_bits(m)));
}

std::size_t SessionConfig::default_t() const {
  const auto [mean, sigma] = expected_events(*this);
  const double w = phase_bits(m);
  const auto slack = static_cast<std::size_t>(std::ceil(1.05 * mean * w));
  return std::max<std::size_t>({slack, min_t(), 1});
}

KeyPool::KeyPool(std::uint64_t master_seed, std::optional<std::uint64_t> capacity)
    : stream_(master_seed, StreamPurpose::key_pool), capacity_(capacity) {}

bool KeyPool::can_draw(std::uint64_t bits) const {
  return !capacity_ || *capacity_ - consumed_ >= bits;
}

std::optional<std::uint64_t> KeyPool::remaining() const {
  if (!capacity_) return std::nullopt;
  return *capacity_ - consumed_;
}

BitString KeyPool::draw(std::size_t bits) {
  if (!can_draw(bits)) throw InsufficientKeyPool(bits, *remaining());
  consumed_ += bits;
  return stream_.bit_string(bits);
}

std::vector<EventPair> pair_events(const std::vector<optics::DetectionEvent>& alice,
                                   const std::vector<optics::DetectionEvent>& bob) {
  std::uint32_t buckets = 0;
  for (const auto& e : bob) buckets = std::max(buckets, e.phase_index + 1);
  std::vector<std::vector<std::size_t>> by_phase(buckets);
  for (std::size_t i = 0; i < bob.size(); ++i) {
    by_phase[bob[i].phase_index].push_back(i);
  }
  std::vector<std::size_t> cursor(buckets, 0);
  std::vector<EventPair> pairs;
  for (const auto& a : alice) {
    const std::uint32_t j = a.phase_index;
    if (j >= buckets || cursor[j] == by_phase[j].size()) continue;
    pairs.push_back({a, bob[by_phase[j][cursor[j]++]]});
  }
  return pairs;
}

BitString negotiate_phases(const toeplitz::ToeplitzSeed& seed,
                           const BitString& k_upd, const BitString& phase_bits) {
  if (phase_bits.size() > seed.cols) {
    throw NegotiationOverflow(phase_bits.size(), seed.cols);
  }
  const BitString d = toeplitz::toeplitz_product(seed, k_upd);
  return phase_bits ^ d.slice(0, phase_bits.size());
}

BitString recover_phases(const toeplitz::ToeplitzSeed& seed,
                         const BitString& k_upd, const BitString& ciphertext) {
  return negotiate_phases(seed, k_upd, ciphertext);
}

RawKeys sift_and_flip(const std::vector<EventPair>& pairs) {
  RawKeys keys{BitString(pairs.size()), BitString(pairs.size())};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    keys.z_a.set(i, p.alice.key_bit != 0);
    const bool flip = p.alice.detector != p.bob.detector;
    keys.z_b.set(i, (p.bob.key_bit != 0) != flip);
  }
  return keys;
}

Reconciliation error_correct(const BitString& z_a, const BitString& z_b,
                             double f) {
  const BitString diff = z_a ^ z_b;
  const std::size_t n = z_a.size();
  Reconciliation rec;
  rec.corrected = z_a;
  rec.error_rate = n == 0 ? 0.0 : static_cast<double>(diff.count()) / n;
  rec.lambda = static_cast<std::uint64_t>(
      std::ceil(n * f * coherent::binary_entropy(rec.error_rate)));
  return rec;
}

std::size_t tag_length(double eps_cor) {
  if (!(eps_cor > 0.0 && eps_cor < 1.0)) {
    throw ConfigError("eps_cor must lie in (0, 1)");
  }
  return static_cast<std::size_t>(std::ceil(std::log2(2.0 / eps_cor)));
}

Verification verify_keys(const BitString& z_a, const BitString& z_b,
                         double eps_cor, const toeplitz::ToeplitzSeed& mac_seed,
                         KeyPool& pool) {
  const std::size_t len = tag_length(eps_cor);
  if (mac_seed.rows != len) {
    throw LengthMismatch("MAC seed rows must equal the tag length " +
                         std::to_string(len));
  }
  const BitString otp = pool.draw(len);
  Verification v;
  v.tag = toeplitz::mac_tag(mac_seed, otp, z_a);
  v.passed = z_a.size() == z_b.size() &&
             toeplitz::mac_verify(mac_seed, otp, z_b, v.tag);
  return v;
}

std::uint64_t key_length(std::uint64_t n, double E, double f, double eps_cor,
                         double eps_sec) {
  if (n == 0) return 0;
  const double nd = static_cast<double>(n);
  const double ell = nd - nd * f * coherent::binary_entropy(E) -
                     std::log2(2.0 / eps_cor) -
                     2.0 * std::log2(3.0 / (2.0 * eps_sec));
  return ell <= 0.0 ? 0 : static_cast<std::uint64_t>(std::floor(ell));
}

BitString privacy_amplify(const BitString& z, std::uint64_t ell,
                          const BitString& pa_seed) {
  if (ell > z.size()) {
    throw LengthMismatch("privacy amplification cannot lengthen the key");
  }
  const toeplitz::ToeplitzSeed seed(pa_seed, ell, z.size());
  return toeplitz::compress(seed, z);
}

std::int64_t net_rate(const SessionReport& report, const SessionConfig& cfg) {
  auto r = static_cast<std::int64_t>(report.ell) -
           static_cast<std::int64_t>(cfg.s) -
           static_cast<std::int64_t>(rule_key_cost(cfg.m).bits);
  if (cfg.accounting.count_verification_key) {
    r -= static_cast<std::int64_t>(report.tag_length);
  }
  if (cfg.accounting.count_pa_seed) {
    r -= static_cast<std::int64_t>(report.pa_seed_length);
  }
  return r;
}

SessionReport run_session(const SessionConfig& cfg) {
  cfg.validate();
  SessionReport rep;
  rep.t = cfg.resolved_t();
  rep.tag_length = tag_length(cfg.eps_cor);
  const unsigned w = phase_bits(cfg.m);
  const std::uint64_t rule_bits = rule_key_cost(cfg.m).bits;

  KeyPool pool(cfg.master_seed, cfg.key_pool_bits);
  const std::uint64_t fixed_cost = rule_bits + cfg.s + rep.tag_length;
  if (!pool.can_draw(fixed_cost)) {
    throw InsufficientKeyPool(fixed_cost, *pool.remaining());
  }

  // Share the mapping rule under a one-time pad.
  const MappingRule alice_rule = draw_rule(cfg);
  const BitString rule_otp = pool.draw(rule_bits);
  rep.messages.rule_ciphertext = otp_encrypt_rule(alice_rule, rule_otp);
  const MappingRule bob_rule =
      otp_decrypt_rule(rep.messages.rule_ciphertext, rule_otp, cfg.m);
  rep.ledger.consumed_mapping_otp = rule_bits;

  // Rounds and announcements.
  PartyEvents events = simulate_rounds(cfg, alice_rule, bob_rule);
  rep.n_alice = events.alice.size();
  rep.n_bob = events.bob.size();
  rep.messages.alice = announce(events.alice);
  rep.messages.bob = announce(events.bob);

  // Negotiate Alice's phase substrings, pair, sift.
  BitString phase_plain;
  for (const auto& e : events.alice) {
    phase_plain.append_uint(alice_rule.substring_value(e.phase_index), w);
  }
  if (phase_plain.size() > rep.t) {
    throw NegotiationOverflow(phase_plain.size(), rep.t);
  }
  const BitString k_upd = pool.draw(cfg.s);
  rep.ledger.consumed_k_upd = cfg.s;
  RandomStream fixed(cfg.master_seed, StreamPurpose::fixed_key);
  const toeplitz::ToeplitzSeed k_fix(
      fixed.bit_string(toeplitz::ToeplitzSeed::seed_length(cfg.s, rep.t)), cfg.s,
      rep.t);
  rep.messages.negotiation_ciphertext = negotiate_phases(k_fix, k_upd, phase_plain);

  const BitString phase_at_bob =
      recover_phases(k_fix, k_upd, rep.messages.negotiation_ciphertext);
  std::vector<optics::DetectionEvent> alice_seen_by_bob = events.alice;
  for (std::size_t i = 0; i < alice_seen_by_bob.size(); ++i) {
    const auto x = static_cast<std::uint32_t>(phase_at_bob.read_uint(i * w, w));
    alice_seen_by_bob[i].phase_index = bob_rule.phase_index_of(x);
  }
  const std::vector<EventPair> pairs = pair_events(alice_seen_by_bob, events.bob);
  rep.n_matched = pairs.size();
  const RawKeys raw = sift_and_flip(pairs);

  // Reconciliation and verification.
  Reconciliation rec = error_correct(raw.z_a, raw.z_b, cfg.f);
  rep.E_emp = rec.error_rate;
  rep.lambda = rec.lambda;
  if (cfg.corrupt_reconciliation && !rec.corrected.empty()) rec.corrected.flip(0);

  RandomStream mac_key(cfg.master_seed, StreamPurpose::mac_key);
  const toeplitz::ToeplitzSeed mac_seed(
      mac_key.bit_string(toeplitz::ToeplitzSeed::seed_length(rep.tag_length,
                                                             raw.z_a.size())),
      rep.tag_length, raw.z_a.size());
  const Verification ver =
      verify_keys(raw.z_a, rec.corrected, cfg.eps_cor, mac_seed, pool);
  rep.messages.tag = ver.tag;
  rep.verification_passed = ver.passed;
  rep.ledger.consumed_verification = rep.tag_length;

  // Privacy amplification.
  rep.ell = ver.passed ? key_length(rep.n_matched, rep.E_emp, cfg.f,
                                    cfg.eps_cor, cfg.eps_sec)
                       : 0;
  rep.pa_seed_length = toeplitz::ToeplitzSeed::seed_length(rep.ell, rep.n_matched);
  BitString pa_seed;
  if (cfg.accounting.count_pa_seed) {
    pa_seed = pool.draw(rep.pa_seed_length);
    rep.ledger.consumed_pa_seed = rep.pa_seed_length;
  } else {
    RandomStream pub(cfg.master_seed, StreamPurpose::public_randomness);
    pa_seed = pub.bit_string(rep.pa_seed_length);
  }
  rep.key_alice = privacy_amplify(raw.z_a, rep.ell, pa_seed);
  rep.key_bob = privacy_amplify(rec.corrected, rep.ell, pa_seed);

  rep.ledger.produced_ell = rep.ell;
  rep.ledger.net_R = net_rate(rep, cfg);
  rep.transcript_digest = digest_hex(fnv1a64(render_transcript(cfg, rep)));
  return rep;
}

}  // namespace pkd::session
