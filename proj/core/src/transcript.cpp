#include "pkd/transcript.hpp"

#include <cstdio>

#include "json.hpp"

namespace pkd::session {

namespace {

using Json = nlohmann::ordered_json;

Json announcements(const std::vector<Announcement>& events) {
  Json out = Json::array();
  for (const auto& e : events) {
    out.push_back({{"round", e.round},
                   {"detector", e.detector == optics::Detector::left ? "L" : "R"}});
  }
  return out;
}

Json config_echo(const SessionConfig& cfg, std::size_t t) {
  return {
      {"N", cfg.N},
      {"m", cfg.m},
      {"mu", cfg.optics.mu},
      {"eta_d", cfg.optics.eta_d},
      {"p_d", cfg.optics.p_d},
      {"f", cfg.f},
      {"eps_cor", cfg.eps_cor},
      {"eps_sec", cfg.eps_sec},
      {"s", cfg.s},
      {"t", t},
      {"seed", cfg.master_seed},
      {"count_verification_key", cfg.accounting.count_verification_key},
      {"count_pa_seed", cfg.accounting.count_pa_seed},
      {"key_pool_bits",
       cfg.key_pool_bits ? Json(*cfg.key_pool_bits) : Json(nullptr)},
  };
}

}  // namespace

std::string render_transcript(const SessionConfig& cfg,
                              const SessionReport& report) {
  const auto& msg = report.messages;
  const KeyLedger& l = report.ledger;
  Json doc = {
      {"format", "pkd-transcript"},
      {"version", kTranscriptVersion},
      {"config", config_echo(cfg, report.t)},
      {"lengths",
       {
           {"n_alice", report.n_alice},
           {"n_bob", report.n_bob},
           {"n_matched", report.n_matched},
           {"rule_ciphertext_bits", msg.rule_ciphertext.size()},
           {"negotiation_ciphertext_bits", msg.negotiation_ciphertext.size()},
           {"tag_bits", msg.tag.size()},
           {"lambda", report.lambda},
           {"ell", report.ell},
           {"pa_seed_bits", report.pa_seed_length},
       }},
      {"announcements",
       {{"alice", announcements(msg.alice)}, {"bob", announcements(msg.bob)}}},
      {"rule_ciphertext", msg.rule_ciphertext.to_hex(BitOrder::lsb_first)},
      {"negotiation_ciphertext",
       msg.negotiation_ciphertext.to_hex(BitOrder::lsb_first)},
      {"verification",
       {{"tag", msg.tag.to_hex(BitOrder::lsb_first)},
        {"passed", report.verification_passed}}},
      {"ledger",
       {
           {"consumed_mapping_otp", l.consumed_mapping_otp},
           {"consumed_k_upd", l.consumed_k_upd},
           {"consumed_verification", l.consumed_verification},
           {"consumed_pa_seed", l.consumed_pa_seed},
           {"produced_ell", l.produced_ell},
           {"net_R", l.net_R},
       }},
  };
  return doc.dump() + "\n";
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest_hex(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(digest));
  return buf;
}

}  // namespace pkd::session
