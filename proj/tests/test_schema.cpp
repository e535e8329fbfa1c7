#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

#ifndef PKD_SCHEMA_DIR
#error "PKD_SCHEMA_DIR must point at docs/schema"
#endif

namespace {

Json load(const std::string& name) {
  std::ifstream in(fs::path(PKD_SCHEMA_DIR) / name);
  REQUIRE_MESSAGE(in.good(), "missing schema " << name);
  return Json::parse(in);
}

/// Validator for the keyword subset the shipped schemas use.
class Validator {
 public:
  explicit Validator(std::string file) : file_(std::move(file)), root_(load(file_)) {}

  std::vector<std::string> check(const Json& doc) {
    errors_.clear();
    visit(root_, root_, doc, "$");
    return errors_;
  }

 private:
  static bool has_type(const Json& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    if (t == "integer") return v.is_number_integer();
    if (t == "number") return v.is_number();
    return false;
  }

  void fail(const std::string& where, const std::string& what) {
    errors_.push_back(where + ": " + what);
  }

  void visit(const Json& root, const Json& schema, const Json& v, const std::string& where) {
    if (schema.contains("$ref")) {
      const std::string ref = schema["$ref"];
      if (ref.rfind("#/$defs/", 0) == 0) {
        visit(root, root["$defs"][ref.substr(8)], v, where);
      } else {
        const Json other = load(ref);
        visit(other, other, v, where);
      }
      return;
    }
    if (schema.contains("anyOf")) {
      const auto saved = errors_;
      bool any = false;
      for (const auto& alt : schema["anyOf"]) {
        errors_.clear();
        visit(root, alt, v, where);
        any = any || errors_.empty();
      }
      errors_ = saved;
      if (!any) fail(where, "matches no anyOf branch");
    }
    if (schema.contains("type")) {
      bool ok = false;
      if (schema["type"].is_array()) {
        for (const auto& t : schema["type"]) ok = ok || has_type(v, t);
      } else {
        ok = has_type(v, schema["type"]);
      }
      if (!ok) {
        fail(where, "wrong type " + std::string(v.type_name()));
        return;
      }
    }
    if (schema.contains("enum")) {
      bool ok = false;
      for (const auto& e : schema["enum"]) ok = ok || e == v;
      if (!ok) fail(where, "value not in enum: " + v.dump());
    }
    if (schema.contains("minimum") && v.is_number() &&
        v.get<double>() < schema["minimum"].get<double>()) {
      fail(where, "below minimum");
    }
    if (schema.contains("pattern") && v.is_string() &&
        !std::regex_search(v.get<std::string>(), std::regex(schema["pattern"].get<std::string>()))) {
      fail(where, "does not match pattern");
    }
    if (v.is_object()) {
      for (const auto& r : schema.value("required", Json::array())) {
        if (!v.contains(r.get<std::string>())) fail(where, "missing " + r.get<std::string>());
      }
      const Json props = schema.value("properties", Json::object());
      for (const auto& [k, sub] : v.items()) {
        if (props.contains(k)) {
          visit(root, props[k], sub, where + "." + k);
        } else if (schema.value("additionalProperties", true) == false) {
          fail(where, "unexpected property " + k);
        }
      }
    }
    if (v.is_array() && schema.contains("items")) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        visit(root, schema["items"], v[i], where + "[" + std::to_string(i) + "]");
      }
    }
  }

  std::string file_;
  Json root_;
  std::vector<std::string> errors_;
};

Json run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = pkd::cli::run_cli(args, out, err);
  REQUIRE_MESSAGE(code == 0, err.str());
  return Json::parse(out.str());
}

void expect_valid(Validator& v, const Json& doc) {
  const auto errors = v.check(doc);
  for (const auto& e : errors) MESSAGE(e);
  CHECK(errors.empty());
}

}  // namespace

TEST_CASE("analyze records validate") {
  Validator v("analyze.json");
  expect_valid(v, run({"analyze"}));
  expect_valid(v, run({"analyze", "--mu", "0"}));
  expect_valid(v, run({"analyze", "--m", "8"}));
}

TEST_CASE("keyrate records validate") {
  Validator v("keyrate.json");
  expect_valid(v, run({"keyrate"}));
  expect_valid(v, run({"keyrate", "--mu", "0.05,0.1,0.2"}));
  expect_valid(v, run({"keyrate", "--N", "0"}));
}

TEST_CASE("simulate summaries and transcripts validate") {
  const fs::path path = fs::temp_directory_path() / "pkd-schema-transcript.json";
  Validator summary("simulate.json");
  expect_valid(summary, run({"simulate", "--N", "20000", "--seed", "3", "--out", path.string()}));
  expect_valid(summary, run({"simulate", "--N", "1000", "--mu", "0", "--pd", "0"}));

  std::ifstream in(path);
  const Json transcript = Json::parse(in);
  Validator t("transcript.json");
  expect_valid(t, transcript);
}

TEST_CASE("entangle-check records validate") {
  Validator v("entangle-check.json");
  expect_valid(v, run({"entangle-check"}));
}

TEST_CASE("validator rejects broken records") {
  Validator v("keyrate.json");
  Json doc = run({"keyrate"});
  doc["rows"][0].erase("ell");
  CHECK_FALSE(v.check(doc).empty());
  doc = run({"keyrate"});
  doc["extra"] = 1;
  CHECK_FALSE(v.check(doc).empty());
  doc = run({"keyrate"});
  doc["rows"][0]["n"] = "many";
  CHECK_FALSE(v.check(doc).empty());

  Validator s("simulate.json");
  Json sim = run({"simulate", "--N", "1000", "--seed", "1"});
  sim["transcript_digest"] = "XYZ";
  CHECK_FALSE(s.check(sim).empty());
  sim = run({"simulate", "--N", "1000", "--seed", "1"});
  sim["ledger"].erase("net_R");
  CHECK_FALSE(s.check(sim).empty());
}
