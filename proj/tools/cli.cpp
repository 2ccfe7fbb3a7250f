#include "cli.hpp"

#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "charp/applications.hpp"
#include "charp/errors.hpp"
#include "charp/parse.hpp"

namespace charp::cli {

namespace {

using nlohmann::ordered_json;

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Request {
  uint32_t prime = 2;
  bool prime_set = false;
  int r = 1;
  std::string vars = "x";
  std::vector<std::string> lets;
  std::vector<std::string> exprs;
  std::string at;
  uint64_t ell = 0;
  std::string format = "text";
  std::string command;
  std::string action;
};

// Result of one invocation: a text rendering and the structured document.
struct Outcome {
  std::string text;
  ordered_json doc = ordered_json::object();
  int code = 0;
};

ordered_json cert_json(const Certificate& c) {
  ordered_json j;
  j["rule"] = c.rule;
  j["place"] = c.place;
  j["witness"] = c.witness;
  j["children"] = ordered_json::array();
  for (const auto& ch : c.children) j["children"].push_back(cert_json(ch));
  return j;
}

std::vector<std::string> split_vars(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      if (cur.empty()) throw Usage("empty name in --vars");
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  return out;
}

uint64_t ipow(uint64_t p, int r) {
  uint64_t m = 1;
  for (int i = 0; i < r; ++i) m *= p;
  return m;
}

class Runner {
 public:
  explicit Runner(const Request& q) : q_(q) {}

  Outcome run() {
    if (q_.command == "verify") return verify();
    ctx_ = FieldContext::create(q_.prime, split_vars(q_.vars));
    for (const auto& l : q_.lets) {
      auto [name, value] = parse_binding(ctx_, l, bindings_);
      bindings_.insert_or_assign(name, value);
    }
    out_.doc["context"] = {{"prime", q_.prime}, {"r", q_.r}, {"vars", ctx_->vars()}};
    out_.doc["input"] = q_.exprs;
    if (q_.command == "witt") return witt();
    if (q_.command == "form") return form();
    if (q_.command == "ksym") return ksym();
    if (q_.command == "hsym") return hsym();
    return solve_as();
  }

 private:
  void need_exprs(size_t n) {
    if (q_.exprs.size() != n)
      throw Usage(q_.command + " " + q_.action + " takes " + std::to_string(n) + " --expr argument" + (n > 1 ? "s" : ""));
  }

  DivisorValuation place() {
    if (q_.at.empty()) throw Usage(q_.command + " " + q_.action + " needs --at");
    DivisorValuation v = parse_valuation(ctx_, q_.at, bindings_);
    out_.doc["place"] = v.to_string();
    return v;
  }

  Outcome& result(const std::string& s) {
    out_.text = s;
    out_.doc["result"] = s;
    return out_;
  }

  Outcome& verdict(const Verdict& v, bool verified) {
    out_.text = status_name(v.status);
    out_.doc["result"] = status_name(v.status);
    out_.doc["verified"] = verified;
    out_.doc["certificate"] = cert_json(v.certificate);
    out_.code = v.status == Status::Zero ? 0 : 1;
    return out_;
  }

  Outcome witt() {
    const std::string& a = q_.action;
    need_exprs(a == "add" || a == "mul" ? 2 : 1);
    WittVector x = parse_witt(ctx_, q_.exprs[0], bindings_);
    if (a == "add") return result(witt_add(x, parse_witt(ctx_, q_.exprs[1], bindings_)).to_string());
    if (a == "mul") return result(witt_mul(x, parse_witt(ctx_, q_.exprs[1], bindings_)).to_string());
    if (a == "frob") return result(witt_frobenius(x).to_string());
    return result(witt_pmul(x).to_string());
  }

  Outcome form() {
    need_exprs(1);
    DiffForm w = parse_form(ctx_, q_.exprs[0], bindings_);
    const std::string& a = q_.action;
    if (a == "d") return result(form_d(w).to_string());
    if (a == "cartier") return result(cartier(w).to_string());
    if (a == "inverse-cartier") return result(inverse_cartier(w).to_string());
    ClosedFormClassification c = classify_closed(w);
    using V = ClosedFormClassification::Verdict;
    if (c.verdict == V::NotClosed) {
      out_.doc["closed"] = false;
      return result("not closed");
    }
    out_.doc["closed"] = true;
    out_.doc["antiderivative"] = c.antiderivative.to_string();
    ordered_json parts = ordered_json::array();
    std::string text = c.verdict == V::Exact ? "exact" : "logarithmic";
    text += ": d(" + c.antiderivative.to_string() + ")";
    for (const auto& t : c.log_parts) {
      std::string b;
      for (size_t i = 0; i < t.b.size(); ++i) b += (i ? " ^ " : "") + std::string("dlog(") + t.b[i].to_string() + ")";
      parts.push_back({{"a", t.a.to_string()}, {"b", b}});
      text += " + (" + t.a.to_string() + ")^" + std::to_string(q_.prime) + " * " + b;
    }
    out_.doc["log_parts"] = parts;
    return result(text);
  }

  Outcome ksym() {
    need_exprs(1);
    KSymbolSum s = parse_ksym(ctx_, q_.exprs[0], ipow(q_.prime, q_.r), bindings_);
    out_.doc["modulus"] = s.modulus();
    const std::string& a = q_.action;
    if (a == "normalize") return result(k_normalize(s).to_string());
    if (a == "residue") return result(k_residue(s, place()).to_string());
    if (a == "dlog") return result(k_dlog(s).to_string());
    Verdict v = k_is_zero(s);
    return verdict(v, v.status != Status::Unknown && k_verify(s, v));
  }

  Outcome hsym() {
    need_exprs(1);
    HSymbolSum s = parse_hsym(ctx_, q_.exprs[0], q_.r, bindings_);
    const std::string& a = q_.action;
    if (a == "normalize") return result(h_normalize(s).to_string());
    if (a == "residue") return result(h_residue(s, place()).to_string());
    if (a == "filtration") {
      FiltrationReport f = h_filtration(s, place());
      out_.doc["level"] = f.level;
      out_.doc["wild"] = f.wild;
      out_.doc["graded"] = f.graded.to_string();
      out_.doc["graded_dt"] = f.graded_dt.to_string();
      return result(f.to_string());
    }
    if (a == "simpleform") {
      SimpleFormDecomposition d = h_simple_form(s, place());
      ordered_json terms = ordered_json::array();
      std::ostringstream os;
      for (const auto& t : d.terms) {
        terms.push_back({{"level", t.level}, {"phi", t.phi.to_string()}, {"phi_dt", t.phi_dt.to_string()}});
        os << "level " << t.level << ": " << t.phi.to_string();
        if (!t.phi_dt.is_zero()) os << " ; dt/t ^ " << t.phi_dt.to_string();
        os << "\n";
      }
      os << "tame: " << d.tame.to_string();
      out_.doc["terms"] = terms;
      out_.doc["tame"] = d.tame.to_string();
      return result(os.str());
    }
    if (a == "classify") {
      DivisorValuation v = place();
      Verdict t = h_is_tame(s, v);
      std::string ram = t.status == Status::Zero ? "tame" : t.status == Status::NonZero ? "wild" : "undecided";
      std::string text = ram;
      out_.doc["ramification"] = ram;
      out_.doc["tame_certificate"] = cert_json(t.certificate);
      if (t.status == Status::Zero) {
        Verdict u = h_is_unramified(s, v);
        std::string un = u.status == Status::Zero ? "unramified" : u.status == Status::NonZero ? "ramified" : "undecided";
        text += ", " + un;
        out_.doc["unramified"] = un;
        out_.doc["unramified_certificate"] = cert_json(u.certificate);
      }
      return result(text);
    }
    Verdict v = h_is_zero(s);
    return verdict(v, v.status != Status::Unknown && h_verify(s, v));
  }

  Outcome solve_as() {
    need_exprs(1);
    RatFunc f = parse_ratfunc(ctx_, q_.exprs[0], bindings_);
    std::optional<RatFunc> g = solve_artin_schreier(f);
    if (!g) {
      out_.code = 1;
      out_.doc["solution"] = nullptr;
      return result("no solution");
    }
    out_.doc["solution"] = g->to_string();
    return result(g->to_string());
  }

  Outcome verify() {
    VerificationReport rep = verify_battery(q_.action, q_.r, q_.ell, q_.prime_set ? q_.prime : 0);
    ordered_json checks = ordered_json::array();
    for (const auto& c : rep.checks)
      checks.push_back({{"check_id", c.check_id},
                        {"anchor", c.anchor},
                        {"expected", c.expected},
                        {"computed", c.computed},
                        {"status", c.pass ? "pass" : "fail"}});
    ordered_json decisions = ordered_json::array();
    for (const auto& d : rep.decisions)
      decisions.push_back({{"check_id", d.check_id},
                           {"kind", d.kind},
                           {"subject", d.subject},
                           {"status", status_name(d.status)},
                           {"verified", d.verified}});
    out_.doc["report"] = {{"battery", rep.battery},     {"characteristic", rep.characteristic},
                          {"r", rep.r},                 {"modulus", rep.modulus},
                          {"note", rep.note},           {"all_passed", rep.all_passed()},
                          {"checks", checks},           {"decisions", decisions}};
    out_.text = rep.to_string();
    if (!out_.text.empty() && out_.text.back() == '\n') out_.text.pop_back();
    out_.code = rep.all_passed() ? 0 : 1;
    return out_;
  }

  const Request& q_;
  Context ctx_;
  Bindings bindings_;
  Outcome out_;
};

bool usage_kind(ErrorKind k) {
  return k == ErrorKind::Parse || k == ErrorKind::UndeclaredVariable || k == ErrorKind::InvalidContext;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Request q;
  CLI::App app{"Symbols, forms and Witt vectors over F_p(x_1..x_m)", "charp"};
  app.fallthrough();
  app.require_subcommand(1);
  auto* prime = app.add_option("--prime", q.prime, "characteristic");
  app.add_option("--r", q.r, "Witt length; K-symbols default to modulus p^r")->check(CLI::Range(0, kMaxWittLength));
  app.add_option("--vars", q.vars, "comma-separated variable names");
  // one value per flag; also keeps CLI11 from splitting "[a, b]" into a list
  app.add_option("--let", q.lets, "binding NAME = expr, applied in order")->allow_extra_args(false);
  app.add_option("--expr", q.exprs, "input expression")->allow_extra_args(false);
  app.add_option("--at", q.at, "place: x=c, x=(f), inf(x) or poly(f, x)");
  app.add_option("--ell", q.ell, "coefficient modulus for verify mod-ell");
  app.add_option("--format", q.format, "text or json")->check(CLI::IsMember({"text", "json"}));

  auto sub = [&](const std::string& name, const std::string& help, std::vector<std::string> actions) {
    auto* s = app.add_subcommand(name, help);
    if (!actions.empty()) s->add_option("action", q.action)->required()->check(CLI::IsMember(actions));
    s->callback([&q, name] { q.command = name; });
    return s;
  };
  sub("witt", "Witt vector arithmetic", {"add", "mul", "frob", "pmul"});
  sub("form", "differential forms", {"d", "cartier", "inverse-cartier", "classify"});
  sub("ksym", "Milnor K-theory symbols", {"normalize", "residue", "dlog", "iszero"});
  sub("hsym", "symbols [w | b}", {"normalize", "residue", "filtration", "simpleform", "classify", "iszero"});
  sub("verify", "verification batteries", {"char2", "char3", "charp", "mod-ell", "kcoeff", "bzp"});
  sub("solve-as", "solve g^p - g = f", {});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  }
  q.prime_set = prime->count() > 0;
  if (q.command != "verify" && q.r < 1) q.r = 1;

  Outcome o;
  bool json = q.format == "json";
  auto fail = [&](const std::string& kind, const std::string& msg, int code) {
    if (json) {
      ordered_json doc{{"schema", 1}, {"command", q.command}, {"action", q.action}};
      doc["error"] = {{"kind", kind}, {"message", msg}};
      out << doc.dump(2) << "\n";
    } else {
      err << "error: " << msg << "\n";
    }
    return code;
  };
  try {
    o = Runner(q).run();
  } catch (const Usage& e) {
    return fail("Usage", e.what(), 2);
  } catch (const Error& e) {
    return fail(error_kind_name(e.kind()), e.what(), usage_kind(e.kind()) ? 2 : 1);
  }
  if (json) {
    ordered_json doc{{"schema", 1}, {"command", q.command}, {"action", q.action}};
    doc.update(o.doc);
    doc["exit_code"] = o.code;
    out << doc.dump(2) << "\n";
  } else {
    out << o.text << "\n";
  }
  return o.code;
}

}  // namespace charp::cli
