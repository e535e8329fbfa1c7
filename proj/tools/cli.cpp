#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "pkd/coherent_math.hpp"
#include "pkd/entanglement_check.hpp"
#include "pkd/errors.hpp"
#include "pkd/mapping_rule.hpp"
#include "pkd/optics_sim.hpp"
#include "pkd/session.hpp"
#include "pkd/transcript.hpp"

namespace pkd::cli {

namespace {

using Json = nlohmann::ordered_json;

class FlagError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string mu = "0.1";
  std::string m = "1024";
  std::string eta = "0.8";
  std::string pd = "1e-8";
  std::string f = "1.05";
  std::string eps_cor = "1e-15";
  std::string eps_sec = "1e-10";
  std::string N = "1e9";
  std::string s = "10000";
  std::optional<std::string> t;
  std::optional<std::string> seed;
  std::optional<std::string> key_pool;
  std::string out;
  std::string format = "json";
  bool count_verification_key = false;
  bool count_pa_seed = false;
  unsigned k_max = 4;
  std::string dtheta = "0,0.3,1.5707963267948966,3.141592653589793";
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  if (parts.empty()) parts.emplace_back();
  return parts;
}

double parse_real(const std::string& flag, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) {
    throw FlagError(flag + ": expected a finite number, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_count(const std::string& flag, const std::string& text) {
  const double v = parse_real(flag, text);
  if (v < 0.0 || v != std::floor(v) || v > 1.8e19) {
    throw FlagError(flag + ": expected a nonnegative integer, got '" + text + "'");
  }
  return static_cast<std::uint64_t>(v);
}

std::uint64_t parse_seed(const std::string& source, const std::string& text) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(text, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.front() == '-') {
    throw FlagError(source + ": expected an unsigned 64-bit seed, got '" + text + "'");
  }
  return v;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw FlagError(message);
}

/// Fully parsed scalar parameters for one record.
struct Scalars {
  double mu = 0.0;
  std::uint32_t m = 0;
  double eta = 0.0;
  double pd = 0.0;
  double f = 0.0;
  double eps_cor = 0.0;
  double eps_sec = 0.0;
  std::uint64_t N = 0;
  std::uint64_t s = 0;
};

struct Sweepable {
  const char* flag;
  std::string Flags::*field;
};

constexpr Sweepable kSweepable[] = {
    {"--mu", &Flags::mu},           {"--m", &Flags::m},
    {"--eta", &Flags::eta},         {"--pd", &Flags::pd},
    {"--f", &Flags::f},             {"--eps-cor", &Flags::eps_cor},
    {"--eps-sec", &Flags::eps_sec}, {"--N", &Flags::N},
    {"--s", &Flags::s},
};

std::string single(const Flags& fl, const Sweepable& sw) {
  const std::string& text = fl.*sw.field;
  if (text.find(',') != std::string::npos) {
    throw FlagError(std::string(sw.flag) + ": lists are only accepted by keyrate");
  }
  return text;
}

enum class PhaseRule { any_at_least_two, power_of_two };

Scalars resolve(const Flags& fl, PhaseRule rule) {
  Scalars sc;
  const auto get = [&](const char* flag) {
    for (const auto& sw : kSweepable) {
      if (std::string(sw.flag) == flag) return single(fl, sw);
    }
    throw std::logic_error("unknown flag");
  };
  sc.mu = parse_real("--mu", get("--mu"));
  require(sc.mu >= 0.0, "--mu must be >= 0");
  const std::uint64_t m = parse_count("--m", get("--m"));
  require(m >= 2 && m <= (1U << 24), "--m must lie in [2, 2^24]");
  sc.m = static_cast<std::uint32_t>(m);
  if (rule == PhaseRule::power_of_two) {
    require(is_phase_count_valid(sc.m), "--m must be a power of two");
  }
  sc.eta = parse_real("--eta", get("--eta"));
  require(sc.eta >= 0.0 && sc.eta <= 1.0, "--eta must lie in [0, 1]");
  sc.pd = parse_real("--pd", get("--pd"));
  require(sc.pd >= 0.0 && sc.pd < 1.0, "--pd must lie in [0, 1)");
  sc.f = parse_real("--f", get("--f"));
  require(sc.f >= 1.0, "--f must be >= 1");
  sc.eps_cor = parse_real("--eps-cor", get("--eps-cor"));
  require(sc.eps_cor > 0.0 && sc.eps_cor < 1.0, "--eps-cor must lie in (0, 1)");
  sc.eps_sec = parse_real("--eps-sec", get("--eps-sec"));
  require(sc.eps_sec > 0.0 && sc.eps_sec < 1.0, "--eps-sec must lie in (0, 1)");
  sc.N = parse_count("--N", get("--N"));
  sc.s = parse_count("--s", get("--s"));
  require(sc.s >= 1, "--s must be >= 1");
  return sc;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Json log_json(const LogScalar& x) {
  if (x.is_zero()) {
    return {{"sci", "0"}, {"ln", nullptr}, {"mantissa", 0.0}, {"exponent", 0}};
  }
  const auto d = x.decimal();
  return {{"sci", x.to_scientific(3)},
          {"ln", x.ln()},
          {"mantissa", d.mantissa},
          {"exponent", d.exponent}};
}

std::string log_csv(const LogScalar& x) {
  return x.is_zero() ? "0," : x.to_scientific(3) + "," + fmt(x.ln());
}

void emit(const Flags& fl, const std::string& text, std::ostream& out) {
  if (fl.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(fl.out, std::ios::binary);
  if (!file) throw FlagError("--out: cannot open '" + fl.out + "' for writing");
  file << text;
}

int run_analyze(const Flags& fl, std::ostream& out) {
  const Scalars sc = resolve(fl, PhaseRule::any_at_least_two);
  const coherent::AnalysisReport r = coherent::analyze(sc.mu, sc.m);
  if (fl.format == "csv") {
    std::string text =
        "mu,m,p_usd,p_usd_ln,p_usd_exact,p_min,random_guess_error,"
        "trace_distance,trace_distance_ln,delta,delta_ln,secrecy_epsilon,"
        "secrecy_epsilon_ln\n";
    text += fmt(r.mu) + "," + std::to_string(r.m) + "," + log_csv(r.p_usd) + "," +
            (r.p_usd_exact ? fmt(*r.p_usd_exact) : "") + "," + fmt(r.p_min) +
            "," + fmt(r.random_guess_error) + "," + log_csv(r.trace_distance_k0) +
            "," + log_csv(r.delta_k0) + "," +
            (r.secrecy_epsilon ? log_csv(*r.secrecy_epsilon) : ",") + "\n";
    emit(fl, text, out);
    return kOk;
  }
  const Json doc = {
      {"command", "analyze"},
      {"mu", r.mu},
      {"m", r.m},
      {"p_usd", log_json(r.p_usd)},
      {"p_usd_exact", r.p_usd_exact ? Json(*r.p_usd_exact) : Json(nullptr)},
      {"p_min", r.p_min},
      {"random_guess_error", r.random_guess_error},
      {"trace_distance_k0", log_json(r.trace_distance_k0)},
      {"delta_k0", log_json(r.delta_k0)},
      {"secrecy_epsilon",
       r.secrecy_epsilon ? log_json(*r.secrecy_epsilon) : Json(nullptr)},
  };
  emit(fl, doc.dump(2) + "\n", out);
  return kOk;
}

struct RateRow {
  std::string param;
  Scalars sc;
  double detection_rate = 0.0;
  std::uint64_t n = 0;
  double E = 0.0;
  std::uint64_t ell = 0;
  std::int64_t R = 0;
};

RateRow rate_row(const Scalars& sc, const Flags& fl, std::string param) {
  RateRow row{std::move(param), sc};
  const optics::OpticsParams op{sc.mu, sc.eta, sc.pd};
  row.detection_rate = optics::detection_rate(op);
  row.n = static_cast<std::uint64_t>(std::llround(static_cast<double>(sc.N) * row.detection_rate));
  row.E = row.n == 0 ? 0.0 : optics::ber_analytic(op);
  row.ell = session::key_length(row.n, row.E, sc.f, sc.eps_cor, sc.eps_sec);

  session::SessionConfig cfg;
  cfg.m = sc.m;
  cfg.s = sc.s;
  cfg.accounting = {fl.count_verification_key, fl.count_pa_seed};
  session::SessionReport rep;
  rep.ell = row.ell;
  rep.tag_length = session::tag_length(sc.eps_cor);
  rep.pa_seed_length = toeplitz::ToeplitzSeed::seed_length(row.ell, row.n);
  row.R = session::net_rate(rep, cfg);
  return row;
}

int run_keyrate(const Flags& fl, std::ostream& out) {
  const Sweepable* swept = nullptr;
  for (const auto& sw : kSweepable) {
    if ((fl.*sw.field).find(',') == std::string::npos) continue;
    if (swept != nullptr) {
      throw FlagError(std::string("only one parameter may be swept; got ") +
                      swept->flag + " and " + sw.flag);
    }
    swept = &sw;
  }

  std::vector<RateRow> rows;
  if (swept == nullptr) {
    rows.push_back(rate_row(resolve(fl, PhaseRule::power_of_two), fl, "base"));
  } else {
    for (const std::string& value : split_list(fl.*swept->field)) {
      Flags one = fl;
      one.*swept->field = value;
      const std::string name = std::string(swept->flag).substr(2);
      rows.push_back(rate_row(resolve(one, PhaseRule::power_of_two), fl, name + "=" + value));
    }
  }

  if (fl.format == "csv") {
    std::string text = "param,n,E,ell,R\n";
    for (const auto& r : rows) {
      text += r.param + "," + std::to_string(r.n) + "," + fmt(r.E) + "," +
              std::to_string(r.ell) + "," + std::to_string(r.R) + "\n";
    }
    emit(fl, text, out);
    return kOk;
  }
  Json arr = Json::array();
  for (const auto& r : rows) {
    arr.push_back({{"param", r.param},
                   {"mu", r.sc.mu},
                   {"m", r.sc.m},
                   {"eta_d", r.sc.eta},
                   {"p_d", r.sc.pd},
                   {"N", r.sc.N},
                   {"s", r.sc.s},
                   {"detection_rate", r.detection_rate},
                   {"n", r.n},
                   {"E", r.E},
                   {"ell", r.ell},
                   {"R", r.R}});
  }
  const Json doc = {{"command", "keyrate"},
                    {"swept", swept ? Json(std::string(swept->flag).substr(2)) : Json(nullptr)},
                    {"count_verification_key", fl.count_verification_key},
                    {"count_pa_seed", fl.count_pa_seed},
                    {"rows", arr}};
  emit(fl, doc.dump(2) + "\n", out);
  return kOk;
}

std::uint64_t resolve_seed(const Flags& fl) {
  if (fl.seed) return parse_seed("--seed", *fl.seed);
  if (const char* env = std::getenv("PKD_SEED"); env != nullptr && *env != '\0') {
    return parse_seed("PKD_SEED", env);
  }
  return 0;
}

Json ledger_json(const session::KeyLedger& l) {
  return {{"consumed_mapping_otp", l.consumed_mapping_otp},
          {"consumed_k_upd", l.consumed_k_upd},
          {"consumed_verification", l.consumed_verification},
          {"consumed_pa_seed", l.consumed_pa_seed},
          {"produced_ell", l.produced_ell},
          {"net_R", l.net_R}};
}

int run_simulate(const Flags& fl, std::ostream& out, std::ostream& err) {
  const Scalars sc = resolve(fl, PhaseRule::power_of_two);
  if (static_cast<double>(sc.N) > kMaxSimulatedRounds) {
    throw FlagError("--N " + std::to_string(sc.N) +
                    " exceeds the Monte Carlo cap of 1e8 rounds; use `pkd "
                    "keyrate` for the analytic path");
  }
  session::SessionConfig cfg;
  cfg.N = sc.N;
  cfg.m = sc.m;
  cfg.optics = {sc.mu, sc.eta, sc.pd};
  cfg.f = sc.f;
  cfg.eps_cor = sc.eps_cor;
  cfg.eps_sec = sc.eps_sec;
  cfg.s = sc.s;
  if (fl.t) cfg.t = parse_count("--t", *fl.t);
  if (fl.key_pool) cfg.key_pool_bits = parse_count("--key-pool", *fl.key_pool);
  cfg.master_seed = resolve_seed(fl);
  cfg.accounting = {fl.count_verification_key, fl.count_pa_seed};
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw FlagError(std::string(cfg.t ? "--t: " : "") + e.what());
  }

  session::SessionReport rep;
  try {
    rep = session::run_session(cfg);
  } catch (const session::InsufficientKeyPool& e) {
    err << "pkd: " << e.what() << "\n";
    return kKeyPool;
  } catch (const session::NegotiationOverflow& e) {
    err << "pkd: " << e.what() << "; raise --t\n";
    return kNegotiationOverflow;
  }

  if (!fl.out.empty()) {
    std::ofstream file(fl.out, std::ios::binary);
    if (!file) throw FlagError("--out: cannot open '" + fl.out + "' for writing");
    file << session::render_transcript(cfg, rep);
  }

  const double detection_fraction =
      cfg.N == 0 ? 0.0 : static_cast<double>(rep.n_alice) / static_cast<double>(cfg.N);
  const bool identical = rep.key_alice == rep.key_bob;
  if (fl.format == "csv") {
    out << "seed,N,n_alice,n_bob,n_matched,detection_fraction,E_emp,lambda,"
           "verification_passed,keys_identical,ell,net_R,transcript_digest\n"
        << cfg.master_seed << "," << cfg.N << "," << rep.n_alice << ","
        << rep.n_bob << "," << rep.n_matched << "," << fmt(detection_fraction)
        << "," << fmt(rep.E_emp) << "," << rep.lambda << ","
        << (rep.verification_passed ? "true" : "false") << ","
        << (identical ? "true" : "false") << "," << rep.ell << ","
        << rep.ledger.net_R << "," << rep.transcript_digest << "\n";
  } else {
    const Json doc = {
        {"command", "simulate"},
        {"seed", cfg.master_seed},
        {"N", cfg.N},
        {"m", cfg.m},
        {"t", rep.t},
        {"n_alice", rep.n_alice},
        {"n_bob", rep.n_bob},
        {"n_matched", rep.n_matched},
        {"detection_fraction", detection_fraction},
        {"detection_rate_analytic", optics::detection_rate(cfg.optics)},
        {"E_emp", rep.E_emp},
        {"E_analytic", optics::ber_analytic(cfg.optics)},
        {"lambda", rep.lambda},
        {"tag_length", rep.tag_length},
        {"verification_passed", rep.verification_passed},
        {"keys_identical", identical},
        {"ell", rep.ell},
        {"pa_seed_length", rep.pa_seed_length},
        {"ledger", ledger_json(rep.ledger)},
        {"transcript_digest", rep.transcript_digest},
        {"transcript_path", fl.out.empty() ? Json(nullptr) : Json(fl.out)},
    };
    out << doc.dump(2) << "\n";
  }
  if (!rep.verification_passed) {
    err << "pkd: key verification failed; no key produced\n";
    return kVerificationFailed;
  }
  return kOk;
}

int run_entangle(const Flags& fl, std::ostream& out) {
  const std::uint64_t m = parse_count("--m", fl.m);
  require(m >= 2 && m % 2 == 0 && m <= (1U << 24),
          "--m must be even and lie in [2, 2^24]");
  require(fl.k_max <= 16, "--k-max must be <= 16");
  std::vector<double> thetas;
  for (const auto& v : split_list(fl.dtheta)) thetas.push_back(parse_real("--dtheta", v));

  std::vector<unsigned> ks;
  for (unsigned k = 0; k <= fl.k_max; ++k) ks.push_back(k);
  const double per = entanglement::phase_error_rate(ks, thetas, static_cast<std::uint32_t>(m));

  std::string csv = "k,delta_theta,parity,expected\n";
  Json rows = Json::array();
  for (const unsigned k : ks) {
    for (const double dt : thetas) {
      const double parity = entanglement::x_basis_parity(entanglement::build_rho_k_state(k, dt));
      const int expected = k % 2 == 0 ? 1 : -1;
      rows.push_back({{"k", k}, {"delta_theta", dt}, {"parity", parity}, {"expected", expected}});
      csv += std::to_string(k) + "," + fmt(dt) + "," + fmt(parity) + "," +
             std::to_string(expected) + "\n";
    }
  }
  if (fl.format == "csv") {
    emit(fl, csv, out);
  } else {
    const Json doc = {{"command", "entangle-check"},
                      {"m", m},
                      {"rows", rows},
                      {"phase_error_rate", per}};
    emit(fl, doc.dump(2) + "\n", out);
  }
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  Flags fl;
  CLI::App app{"Probability key distribution lab", "pkd"};
  app.require_subcommand(1);

  const auto format_opt = [&](CLI::App* sub) {
    sub->add_option("--format", fl.format, "Record format")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", fl.out, "Output path");
  };
  const auto physics = [&](CLI::App* sub) {
    sub->add_option("--mu", fl.mu, "Mean photon number per pulse");
    sub->add_option("--m", fl.m, "Phase count");
    sub->add_option("--eta", fl.eta, "Detector efficiency");
    sub->add_option("--pd", fl.pd, "Dark count probability per gate");
    sub->add_option("--f", fl.f, "Error-correction efficiency");
    sub->add_option("--eps-cor", fl.eps_cor, "Correctness parameter");
    sub->add_option("--eps-sec", fl.eps_sec, "Secrecy parameter");
    sub->add_option("--N", fl.N, "Rounds per session");
    sub->add_option("--s", fl.s, "Length of K_upd in bits");
    sub->add_flag("--count-verification-key", fl.count_verification_key,
                  "Charge the verification pad to R");
    sub->add_flag("--count-pa-seed", fl.count_pa_seed,
                  "Draw the PA seed from the pool and charge it to R");
  };

  auto* analyze = app.add_subcommand("analyze", "Discrimination and distance figures");
  analyze->add_option("--mu", fl.mu, "Mean photon number per pulse");
  analyze->add_option("--m", fl.m, "Phase count");
  format_opt(analyze);

  auto* keyrate = app.add_subcommand("keyrate", "Analytic key rate; one flag may be a comma list");
  physics(keyrate);
  format_opt(keyrate);

  auto* simulate = app.add_subcommand("simulate", "Seeded Monte Carlo session");
  physics(simulate);
  simulate->add_option("--t", fl.t, "Negotiation pad length in bits");
  simulate->add_option("--seed", fl.seed, "Master seed (falls back to PKD_SEED)");
  simulate->add_option("--key-pool", fl.key_pool, "Pre-shared pool capacity in bits");
  format_opt(simulate);

  auto* entangle = app.add_subcommand("entangle-check", "Zero phase-error check");
  entangle->add_option("--m", fl.m, "Phase count (must be even)");
  entangle->add_option("--k-max", fl.k_max, "Largest photon number");
  entangle->add_option("--dtheta", fl.dtheta, "Comma list of phase differences");
  format_opt(entangle);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "pkd: " << e.what() << "\n";
    return kBadFlags;
  }

  try {
    if (analyze->parsed()) return run_analyze(fl, out);
    if (keyrate->parsed()) return run_keyrate(fl, out);
    if (simulate->parsed()) return run_simulate(fl, out, err);
    return run_entangle(fl, out);
  } catch (const FlagError& e) {
    err << "pkd: " << e.what() << "\n";
  } catch (const ConfigError& e) {
    err << "pkd: " << e.what() << "\n";
  } catch (const DomainError& e) {
    err << "pkd: " << e.what() << "\n";
  }
  return kBadFlags;
}

}  // namespace pkd::cli
