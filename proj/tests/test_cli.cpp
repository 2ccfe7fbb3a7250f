#include "doctest.h"

#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "json.hpp"

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "charp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = charp::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const char* kDelta = "D = a1^4*a2*a3^2 + a1^3*a3^3 + a3^4 + a1^5*a3*a4 + a1^4*a4^2 + a1^6*a6";

}  // namespace

TEST_CASE("cli: residue of {a1^12/D} mod 8 is 4") {
  Run r = run({"--prime", "2", "--r", "3", "--vars", "a1,a2,a3,a4,a6", "--let", kDelta, "ksym", "residue", "--at",
               "a1=0", "--expr", "{a1^12 / D}@8"});
  CHECK(r.code == 0);
  CHECK(r.out == "4\n");
  for (int rr : {1, 2}) {
    Run s = run({"--prime", "2", "--r", std::to_string(rr), "--vars", "a1,a2,a3,a4,a6", "--let", kDelta, "ksym",
                 "residue", "--at", "a1=0", "--expr", "{a1^12 / D}"});
    CHECK(s.out == "0\n");
  }
}

TEST_CASE("cli: iszero verdicts and exit codes") {
  Run z = run({"--prime", "3", "--r", "1", "--vars", "t", "hsym", "iszero", "--expr", "[1/t | t}"});
  CHECK(z.code == 0);
  CHECK(z.out == "Zero\n");
  Run n = run({"--prime", "3", "--vars", "x,t", "hsym", "iszero", "--expr", "[x/t | t}"});
  CHECK(n.code == 1);
  CHECK(n.out == "NonZero\n");
  Run k = run({"--prime", "2", "--vars", "x", "ksym", "iszero", "--expr", "{x, x + 1}"});
  CHECK(k.code == 0);
  CHECK(k.out == "Zero\n");
}

TEST_CASE("cli: verify char2 passes") {
  Run r = run({"verify", "char2", "--r", "1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("PASS c2.residue-j") != std::string::npos);
}

TEST_CASE("cli: structured output") {
  Run r = run({"--prime", "3", "--vars", "t", "--format", "json", "hsym", "iszero", "--expr", "[1/t | t}"});
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["schema"] == 1);
  CHECK(doc["result"] == "Zero");
  CHECK(doc["verified"] == true);
  CHECK(doc["certificate"]["rule"].is_string());

  Run v = run({"verify", "char3", "--r", "2", "--format", "json"});
  auto rep = nlohmann::json::parse(v.out);
  CHECK(rep["report"]["all_passed"] == true);
  for (const auto& c : rep["report"]["checks"]) {
    CHECK(c.contains("check_id"));
    CHECK(c.contains("anchor"));
    CHECK(c.contains("expected"));
    CHECK(c.contains("computed"));
    CHECK(c["status"] == "pass");
  }
  CHECK_FALSE(rep["report"]["decisions"].empty());
  for (const auto& d : rep["report"]["decisions"]) {
    CHECK(d["status"] != "Unknown");
    if (d["kind"] == "zero-test") CHECK(d["verified"] == true);
  }

  Run e = run({"--prime", "2", "--vars", "x", "--format", "json", "witt", "frob", "--expr", "[x, "});
  CHECK(e.code == 2);
  auto err = nlohmann::json::parse(e.out);
  CHECK(err["error"]["kind"] == "ParseError");
}

TEST_CASE("cli: other subcommands") {
  CHECK(run({"--prime", "2", "--vars", "x", "witt", "add", "--expr", "[x, 1]", "--expr", "[1, x]"}).out ==
        "[x + 1, 1]\n");
  CHECK(run({"--prime", "3", "--vars", "x", "witt", "pmul", "--expr", "[x, 1]"}).out == "[0, x^3]\n");
  CHECK(run({"--prime", "3", "--vars", "x", "form", "cartier", "--expr", "x^2 * d(x)"}).out == "d(x)\n");
  CHECK(run({"--prime", "3", "--vars", "x,y", "form", "classify", "--expr", "x^2 * d(y)"}).out == "not closed\n");
  Run s = run({"--prime", "2", "--vars", "x", "solve-as", "--expr", "x^2 + x"});
  CHECK(s.code == 0);
  CHECK(s.out == "x\n");
  CHECK(run({"--prime", "2", "--vars", "x", "solve-as", "--expr", "x"}).code == 1);
  Run f = run({"--prime", "2", "--vars", "x,t", "hsym", "filtration", "--at", "t=0", "--expr", "[x/t^3 | x}"});
  CHECK(f.out == "at t=0: level 3, class d(x)\n");
  CHECK(run({"--prime", "2", "--vars", "x,t", "hsym", "classify", "--at", "t=0", "--expr", "[x | t}"}).out ==
        "tame, ramified\n");
}

TEST_CASE("cli: usage errors exit 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"witt", "twist", "--expr", "[x]"}).code == 2);
  CHECK(run({"--prime", "2", "--vars", "x", "witt", "add", "--expr", "[x]"}).code == 2);
  CHECK(run({"--prime", "2", "--vars", "x", "ksym", "residue", "--expr", "{x}"}).code == 2);
  CHECK(run({"--prime", "2", "--vars", "x", "ksym", "iszero", "--expr", "{y}"}).code == 2);
  CHECK(run({"--prime", "4", "--vars", "x", "ksym", "iszero", "--expr", "{x}"}).code == 2);
  CHECK(run({"--format", "yaml", "verify", "char2"}).code == 2);
  // refused computations are not usage errors
  CHECK(run({"--prime", "3", "--vars", "x,y", "form", "cartier", "--expr", "x * d(y)"}).code == 1);
}

TEST_CASE("cli: output is deterministic") {
  std::vector<std::string> args{"--prime", "2", "--vars", "x,t", "--format", "json", "hsym", "iszero", "--expr",
                                "[x/t^3 | x} + [t | x}"};
  CHECK(run(args).out == run(args).out);
}
