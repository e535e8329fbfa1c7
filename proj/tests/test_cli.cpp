#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "pkd/optics_sim.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;
using pkd::cli::run_cli;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "pkd-cli-tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("analyze with defaults") {
  const Run r = cli({"analyze"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["p_min"].get<double>() == doctest::Approx(0.9983).epsilon(0.0005));
  CHECK(j["p_usd"]["exponent"] == -3657);
  CHECK(j["p_usd"]["sci"] == "1.94e-3657");
  CHECK(j["p_usd_exact"].is_null());
}

TEST_CASE("analyze edge cases") {
  Run r = cli({"analyze", "--mu", "0"});
  REQUIRE(r.code == 0);
  Json j = Json::parse(r.out);
  CHECK(j["p_usd"]["sci"] == "0");
  CHECK(std::abs(j["p_min"].get<double>() - (1.0 - 1.0 / 1024)) <= 1e-10);

  r = cli({"analyze", "--m", "8", "--mu", "0.1"});
  REQUIRE(r.code == 0);
  j = Json::parse(r.out);
  CHECK(j["p_usd_exact"].is_number());

  r = cli({"analyze", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("mu,m,p_usd,p_usd_ln,", 0) == 0);
}

TEST_CASE("keyrate") {
  Run r = cli({"keyrate"});
  REQUIRE(r.code == 0);
  Json j = Json::parse(r.out);
  REQUIRE(j["rows"].size() == 1);
  CHECK(j["rows"][0]["n"].get<double>() / 1e9 == doctest::Approx(0.1449).epsilon(0.0005 / 0.1449));

  r = cli({"keyrate", "--mu", "0.05,0.1,0.2"});
  REQUIRE(r.code == 0);
  j = Json::parse(r.out);
  REQUIRE(j["rows"].size() == 3);
  CHECK(j["swept"] == "mu");
  CHECK(j["rows"][0]["param"] == "mu=0.05");
  CHECK(j["rows"][0]["n"].get<std::uint64_t>() < j["rows"][1]["n"].get<std::uint64_t>());
  CHECK(j["rows"][1]["n"].get<std::uint64_t>() < j["rows"][2]["n"].get<std::uint64_t>());

  r = cli({"keyrate", "--N", "0", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "param,n,E,ell,R\nbase,0,0,0,-20240\n");

  r = cli({"keyrate", "--mu", "0.1,0.2", "--eta", "0.5,0.6"});
  CHECK(r.code == 2);
  CHECK(r.err.find("only one parameter") != std::string::npos);

  const Run plain = cli({"keyrate", "--format", "csv"});
  const Run flagged = cli({"keyrate", "--format", "csv", "--count-verification-key"});
  REQUIRE(flagged.code == 0);
  CHECK(plain.out != flagged.out);
}

TEST_CASE("simulate is reproducible and writes a transcript") {
  const fs::path a = scratch("a.json"), b = scratch("b.json");
  const Run r1 = cli({"simulate", "--N", "100000", "--seed", "42", "--out", a.string()});
  const Run r2 = cli({"simulate", "--N", "100000", "--seed", "42", "--out", b.string()});
  REQUIRE(r1.code == 0);
  REQUIRE(r2.code == 0);
  Json s1 = Json::parse(r1.out), s2 = Json::parse(r2.out);
  s1.erase("transcript_path");
  s2.erase("transcript_path");
  CHECK(s1 == s2);
  CHECK(slurp(a) == slurp(b));
  CHECK_FALSE(slurp(a).empty());
  const Json s = Json::parse(r1.out);
  CHECK(s["keys_identical"] == true);
  CHECK(s["transcript_path"] == a.string());
  const Json t = Json::parse(slurp(a));
  CHECK(t["format"] == "pkd-transcript");
  CHECK(t["lengths"]["n_alice"] == s["n_alice"]);
}

TEST_CASE("simulate at the reference seed") {
  const Run r = cli({"simulate", "--N", "1000000", "--seed", "42"});
  REQUIRE(r.code == 0);
  const Json s = Json::parse(r.out);
  const double E = s["E_analytic"].get<double>();
  const double n = s["n_matched"].get<double>();
  CHECK(std::abs(s["E_emp"].get<double>() - E) <= 3 * std::sqrt(E * (1 - E) / n));
  CHECK(s["verification_passed"] == true);
  CHECK(s["keys_identical"] == true);
}

TEST_CASE("simulate edge cases") {
  Run r = cli({"simulate", "--N", "10000", "--mu", "0", "--pd", "0", "--seed", "1"});
  REQUIRE(r.code == 0);
  Json s = Json::parse(r.out);
  CHECK(s["n_alice"] == 0);
  CHECK(s["ell"] == 0);

  r = cli({"simulate"});
  CHECK(r.code == 2);
  CHECK(r.err.find("keyrate") != std::string::npos);

  r = cli({"simulate", "--N", "200000000"});
  CHECK(r.code == 2);

  r = cli({"simulate", "--N", "1000", "--key-pool", "100"});
  CHECK(r.code == 3);

  r = cli({"simulate", "--N", "1000", "--t", "1", "--mu", "0.1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("--t") != std::string::npos);
}

TEST_CASE("PKD_SEED is the seed fallback") {
  ::setenv("PKD_SEED", "7", 1);
  const Run env = cli({"simulate", "--N", "20000"});
  ::unsetenv("PKD_SEED");
  const Run flag = cli({"simulate", "--N", "20000", "--seed", "7"});
  const Run zero = cli({"simulate", "--N", "20000"});
  REQUIRE(env.code == 0);
  CHECK(env.out == flag.out);
  CHECK(env.out != zero.out);
  CHECK(Json::parse(zero.out)["seed"] == 0);
}

TEST_CASE("negotiation overflow exits 4") {
  int code = 0;
  for (int seed = 0; seed < 2000 && code != 4; ++seed) {
    code = cli({"simulate", "--N", "1000", "--mu", "1.5e-5", "--eta", "1", "--pd", "0",
                "--s", "100", "--seed", std::to_string(seed)})
               .code;
    REQUIRE((code == 0 || code == 4));
  }
  CHECK(code == 4);
}

TEST_CASE("flag errors") {
  Run r = cli({"keyrate", "--bogus", "1"});
  CHECK(r.code == 2);
  r = cli({});
  CHECK(r.code == 2);
  r = cli({"analyze", "--mu", "abc"});
  CHECK(r.code == 2);
  CHECK(r.err.find("--mu") != std::string::npos);
  r = cli({"keyrate", "--eta", "1.5"});
  CHECK(r.code == 2);
  CHECK(r.err.find("--eta") != std::string::npos);
  r = cli({"keyrate", "--m", "1000"});
  CHECK(r.code == 2);
  CHECK(r.err.find("--m") != std::string::npos);
  r = cli({"entangle-check", "--m", "7"});
  CHECK(r.code == 2);
  r = cli({"analyze", "--format", "xml"});
  CHECK(r.code == 2);
}

TEST_CASE("entangle-check") {
  Run r = cli({"entangle-check"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["rows"].size() == 20);
  CHECK(std::abs(j["phase_error_rate"].get<double>()) < 1e-10);
  for (const auto& row : j["rows"]) {
    CHECK(std::abs(row["parity"].get<double>() - row["expected"].get<double>()) < 1e-10);
  }
  r = cli({"entangle-check", "--format", "csv", "--k-max", "1", "--dtheta", "0"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("k,delta_theta,parity,expected\n", 0) == 0);
}
