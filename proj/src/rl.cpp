#include "porlab/rl.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace porlab {

// ---- construction ----

static RlTermPtr mk_term(RlTerm t) { return std::make_shared<const RlTerm>(std::move(t)); }

RlTermPtr rt_var(std::string name) { return mk_term({RlTerm::Var, std::move(name), {}, {}}); }
RlTermPtr rt_eps() { return mk_term({RlTerm::Eps, {}, {}, {}}); }
RlTermPtr rt_lit(int bit) { return mk_term({bit ? RlTerm::Lit1 : RlTerm::Lit0, {}, {}, {}}); }
RlTermPtr rt_cat(RlTermPtr a, RlTermPtr b) {
  return mk_term({RlTerm::Cat, {}, std::move(a), std::move(b)});
}
RlTermPtr rt_times(RlTermPtr a, RlTermPtr b) {
  return mk_term({RlTerm::Times, {}, std::move(a), std::move(b)});
}
RlTermPtr rt_string(const BitString& s) {
  if (s.empty()) return rt_eps();
  RlTermPtr t = rt_lit(s[0] - '0');
  for (size_t i = 1; i < s.size(); ++i) t = rt_cat(t, rt_lit(s[i] - '0'));
  return t;
}

static RlFormulaPtr mk_formula(RlFormula f) {
  return std::make_shared<const RlFormula>(std::move(f));
}

RlFormulaPtr rf_flip(RlTermPtr t) {
  return mk_formula({RlFormula::Flip, std::move(t), {}, {}, {}, {}, {}});
}
RlFormulaPtr rf_eq(RlTermPtr t, RlTermPtr s) {
  return mk_formula({RlFormula::Eq, std::move(t), std::move(s), {}, {}, {}, {}});
}
RlFormulaPtr rf_sub(RlTermPtr t, RlTermPtr s) {
  return mk_formula({RlFormula::SubInit, std::move(t), std::move(s), {}, {}, {}, {}});
}
RlFormulaPtr rf_not(RlFormulaPtr f) {
  return mk_formula({RlFormula::Not, {}, {}, std::move(f), {}, {}, {}});
}
RlFormulaPtr rf_and(RlFormulaPtr f, RlFormulaPtr g) {
  return mk_formula({RlFormula::And, {}, {}, std::move(f), std::move(g), {}, {}});
}
RlFormulaPtr rf_or(RlFormulaPtr f, RlFormulaPtr g) {
  return mk_formula({RlFormula::Or, {}, {}, std::move(f), std::move(g), {}, {}});
}
RlFormulaPtr rf_imp(RlFormulaPtr f, RlFormulaPtr g) {
  return mk_formula({RlFormula::Imp, {}, {}, std::move(f), std::move(g), {}, {}});
}
RlFormulaPtr rf_quant(RlFormula::Kind q, std::string var, QuantRange range, RlTermPtr bound,
                      RlFormulaPtr body) {
  if (q != RlFormula::Exists && q != RlFormula::Forall)
    throw std::invalid_argument("rf_quant expects a quantifier kind");
  if (range != QuantRange::Unbounded && !bound)
    throw std::invalid_argument("annotated quantifier needs a range term");
  if (bound) {
    std::vector<std::string> vs;
    rl_free_vars(*bound, vs);
    if (std::find(vs.begin(), vs.end(), var) != vs.end())
      throw std::invalid_argument("range term mentions the bound variable");
  }
  return mk_formula({q, std::move(bound), {}, std::move(body), {}, std::move(var), range});
}

// ---- free variables ----

void rl_free_vars(const RlTerm& t, std::vector<std::string>& out) {
  switch (t.kind) {
    case RlTerm::Var:
      if (std::find(out.begin(), out.end(), t.var) == out.end()) out.push_back(t.var);
      return;
    case RlTerm::Eps:
    case RlTerm::Lit0:
    case RlTerm::Lit1: return;
    case RlTerm::Cat:
    case RlTerm::Times:
      rl_free_vars(*t.a, out);
      rl_free_vars(*t.b, out);
      return;
  }
}

void rl_free_vars(const RlFormula& f, std::vector<std::string>& out) {
  switch (f.kind) {
    case RlFormula::Flip: rl_free_vars(*f.t, out); return;
    case RlFormula::Eq:
    case RlFormula::SubInit:
      rl_free_vars(*f.t, out);
      rl_free_vars(*f.s, out);
      return;
    case RlFormula::Not: rl_free_vars(*f.f, out); return;
    case RlFormula::And:
    case RlFormula::Or:
    case RlFormula::Imp:
      rl_free_vars(*f.f, out);
      rl_free_vars(*f.g, out);
      return;
    case RlFormula::Exists:
    case RlFormula::Forall: {
      if (f.t) rl_free_vars(*f.t, out);
      std::vector<std::string> body;
      rl_free_vars(*f.f, body);
      for (auto& v : body)
        if (v != f.var && std::find(out.begin(), out.end(), v) == out.end())
          out.push_back(v);
      return;
    }
  }
}

// ---- evaluation ----

BitString eval_term(const RlTerm& t, const Environment& env) {
  switch (t.kind) {
    case RlTerm::Var: {
      auto it = env.find(t.var);
      if (it == env.end()) throw std::runtime_error("unbound variable " + t.var);
      return it->second;
    }
    case RlTerm::Eps: return "";
    case RlTerm::Lit0: return "0";
    case RlTerm::Lit1: return "1";
    case RlTerm::Cat: return concat(eval_term(*t.a, env), eval_term(*t.b, env));
    case RlTerm::Times: return times(eval_term(*t.a, env), eval_term(*t.b, env));
  }
  throw std::logic_error("unreachable");
}

static std::vector<BitString> quant_values(const RlFormula& f, Environment& env,
                                           long long quant_cap) {
  switch (f.range) {
    case QuantRange::Unbounded:
      throw std::runtime_error("unbounded quantifier is not executable");
    case QuantRange::LenLe: {
      BitString v = eval_term(*f.t, env);
      if (v.size() >= 63 || ((2LL << v.size()) - 1) > quant_cap)
        throw std::runtime_error("quantifier range exceeds the instantiation cap");
      return all_strings_upto(int(v.size()));
    }
    case QuantRange::Subword: {
      BitString v = eval_term(*f.t, env);
      std::set<BitString> seen{""};
      for (size_t i = 0; i < v.size(); ++i)
        for (size_t len = 1; i + len <= v.size(); ++len) seen.insert(v.substr(i, len));
      if ((long long)seen.size() > quant_cap)
        throw std::runtime_error("quantifier range exceeds the instantiation cap");
      return {seen.begin(), seen.end()};
    }
    case QuantRange::InitialSub: {
      BitString v = eval_term(*f.t, env);
      std::vector<BitString> out;
      for (size_t len = 0; len <= v.size(); ++len) out.push_back(v.substr(0, len));
      if ((long long)out.size() > quant_cap)
        throw std::runtime_error("quantifier range exceeds the instantiation cap");
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

namespace {
// set env[var]=value for one scope, restoring the previous binding on exit
struct Scoped {
  Environment& env;
  std::string var;
  bool had;
  BitString old;
  Scoped(Environment& e, const std::string& v, BitString value) : env(e), var(v) {
    auto it = env.find(var);
    had = it != env.end();
    if (had) old = it->second;
    env[var] = std::move(value);
  }
  ~Scoped() {
    if (had)
      env[var] = old;
    else
      env.erase(var);
  }
};
}  // namespace

static int eval_std_rec(const RlFormula& f, Environment& env, const OracleIface& eta,
                        long long quant_cap) {
  switch (f.kind) {
    case RlFormula::Flip: return eta.query(eval_term(*f.t, env));
    case RlFormula::Eq: return eval_term(*f.t, env) == eval_term(*f.s, env) ? 1 : 0;
    case RlFormula::SubInit:
      return is_initial_subword(eval_term(*f.t, env), eval_term(*f.s, env)) ? 1 : 0;
    case RlFormula::Not: return 1 - eval_std_rec(*f.f, env, eta, quant_cap);
    case RlFormula::And:
      return std::min(eval_std_rec(*f.f, env, eta, quant_cap),
                      eval_std_rec(*f.g, env, eta, quant_cap));
    case RlFormula::Or:
      return std::max(eval_std_rec(*f.f, env, eta, quant_cap),
                      eval_std_rec(*f.g, env, eta, quant_cap));
    case RlFormula::Imp:
      return std::max(1 - eval_std_rec(*f.f, env, eta, quant_cap),
                      eval_std_rec(*f.g, env, eta, quant_cap));
    case RlFormula::Exists:
    case RlFormula::Forall: {
      bool ex = f.kind == RlFormula::Exists;
      int acc = ex ? 0 : 1;
      for (auto& u : quant_values(f, env, quant_cap)) {
        Scoped bind(env, f.var, u);
        int v = eval_std_rec(*f.f, env, eta, quant_cap);
        acc = ex ? std::max(acc, v) : std::min(acc, v);
        if (acc == (ex ? 1 : 0)) break;
      }
      return acc;
    }
  }
  throw std::logic_error("unreachable");
}

int eval_standard(const RlFormula& f, const Environment& env, const OracleIface& eta,
                  long long quant_cap) {
  Environment e = env;
  return eval_std_rec(f, e, eta, quant_cap);
}

static CylinderSet eval_meas_rec(const RlFormula& f, Environment& env, int coord_cap,
                                 long long quant_cap) {
  switch (f.kind) {
    case RlFormula::Flip: return CylinderSet::flip(eval_term(*f.t, env), 1);
    case RlFormula::Eq:
      return eval_term(*f.t, env) == eval_term(*f.s, env) ? CylinderSet::full()
                                                          : CylinderSet::none();
    case RlFormula::SubInit:
      return is_initial_subword(eval_term(*f.t, env), eval_term(*f.s, env))
                 ? CylinderSet::full()
                 : CylinderSet::none();
    case RlFormula::Not: return cyl_complement(eval_meas_rec(*f.f, env, coord_cap, quant_cap));
    case RlFormula::And:
      return cyl_intersect(eval_meas_rec(*f.f, env, coord_cap, quant_cap),
                           eval_meas_rec(*f.g, env, coord_cap, quant_cap), coord_cap);
    case RlFormula::Or:
      return cyl_union(eval_meas_rec(*f.f, env, coord_cap, quant_cap),
                       eval_meas_rec(*f.g, env, coord_cap, quant_cap), coord_cap);
    case RlFormula::Imp:
      return cyl_union(cyl_complement(eval_meas_rec(*f.f, env, coord_cap, quant_cap)),
                       eval_meas_rec(*f.g, env, coord_cap, quant_cap), coord_cap);
    case RlFormula::Exists:
    case RlFormula::Forall: {
      bool ex = f.kind == RlFormula::Exists;
      CylinderSet acc = ex ? CylinderSet::none() : CylinderSet::full();
      for (auto& u : quant_values(f, env, quant_cap)) {
        Scoped bind(env, f.var, u);
        CylinderSet v = eval_meas_rec(*f.f, env, coord_cap, quant_cap);
        acc = ex ? cyl_union(acc, v, coord_cap) : cyl_intersect(acc, v, coord_cap);
      }
      return acc;
    }
  }
  throw std::logic_error("unreachable");
}

CylinderSet eval_measure(const RlFormula& f, const Environment& env, int coord_cap,
                         long long quant_cap) {
  Environment e = env;
  return eval_meas_rec(f, e, coord_cap, quant_cap);
}

// ---- classification ----

static bool only_subword_quants(const RlFormula& f) {
  switch (f.kind) {
    case RlFormula::Flip:
    case RlFormula::Eq:
    case RlFormula::SubInit: return true;
    case RlFormula::Not: return only_subword_quants(*f.f);
    case RlFormula::And:
    case RlFormula::Or:
    case RlFormula::Imp: return only_subword_quants(*f.f) && only_subword_quants(*f.g);
    case RlFormula::Exists:
    case RlFormula::Forall:
      return (f.range == QuantRange::Subword || f.range == QuantRange::InitialSub) &&
             only_subword_quants(*f.f);
  }
  return false;
}

static bool bounded_exists_prefix(const RlFormula& f) {
  const RlFormula* p = &f;
  int stripped = 0;
  while (p->kind == RlFormula::Exists && p->range == QuantRange::LenLe) {
    ++stripped;
    p = p->f.get();
  }
  return stripped > 0 && only_subword_quants(*p);
}

static bool in_extended_class(const RlFormula& f) {
  if (only_subword_quants(f)) return true;
  switch (f.kind) {
    case RlFormula::And:
    case RlFormula::Or: return in_extended_class(*f.f) && in_extended_class(*f.g);
    case RlFormula::Exists:
      if (f.range == QuantRange::LenLe) return in_extended_class(*f.f);
      [[fallthrough]];
    case RlFormula::Forall:
      return (f.range == QuantRange::Subword || f.range == QuantRange::InitialSub) &&
             in_extended_class(*f.f);
    default: return false;
  }
}

RlClass classify(const RlFormula& f) {
  if (only_subword_quants(f)) return RlClass::Sigma_b_0;
  if (bounded_exists_prefix(f)) return RlClass::Sigma_b_1;
  if (in_extended_class(f)) return RlClass::ExtendedSigma_b_1;
  return RlClass::Other;
}

std::string rl_class_name(RlClass c) {
  switch (c) {
    case RlClass::Sigma_b_0: return "Sigma_b_0";
    case RlClass::Sigma_b_1: return "Sigma_b_1";
    case RlClass::ExtendedSigma_b_1: return "extended_Sigma_b_1";
    case RlClass::Other: return "other";
  }
  throw std::logic_error("unreachable");
}

// ---- defining formulas ----

static RlTermPtr bound_to_term(const BoundTerm& t, const std::vector<RlTermPtr>& inputs) {
  switch (t.kind) {
    case BoundTerm::Eps: return rt_eps();
    case BoundTerm::Lit0: return rt_lit(0);
    case BoundTerm::Lit1: return rt_lit(1);
    case BoundTerm::Var: return inputs.at(size_t(t.var) - 1);
    case BoundTerm::Cat: return rt_cat(bound_to_term(*t.a, inputs), bound_to_term(*t.b, inputs));
    case BoundTerm::Times:
      return rt_times(bound_to_term(*t.a, inputs), bound_to_term(*t.b, inputs));
  }
  throw std::logic_error("unreachable");
}

static RlFormulaPtr repr_rec(const PorFn& f, const std::vector<RlTermPtr>& in, RlTermPtr out,
                             int& ctr) {
  switch (f.kind) {
    case PorFn::E: return rf_and(rf_eq(in[0], in[0]), rf_eq(out, rt_eps()));
    case PorFn::Proj: {
      RlFormulaPtr acc;
      for (int j = 1; j <= f.n; ++j) {
        if (j == f.i) continue;
        RlFormulaPtr c = rf_eq(in[size_t(j) - 1], in[size_t(j) - 1]);
        acc = acc ? rf_and(acc, c) : c;
      }
      RlFormulaPtr last = rf_eq(out, in[size_t(f.i) - 1]);
      return acc ? rf_and(acc, last) : last;
    }
    case PorFn::Succ: return rf_eq(out, rt_cat(in[0], rt_lit(f.b)));
    case PorFn::Cond: {
      RlFormulaPtr d1 = rf_and(rf_eq(in[0], rt_eps()), rf_eq(out, in[1]));
      std::string w1 = "z" + std::to_string(++ctr);
      std::string w2 = "z" + std::to_string(++ctr);
      RlFormulaPtr d2 = rf_quant(
          RlFormula::Exists, w1, QuantRange::LenLe, in[0],
          rf_and(rf_eq(in[0], rt_cat(rt_var(w1), rt_lit(0))), rf_eq(out, in[2])));
      RlFormulaPtr d3 = rf_quant(
          RlFormula::Exists, w2, QuantRange::LenLe, in[0],
          rf_and(rf_eq(in[0], rt_cat(rt_var(w2), rt_lit(1))), rf_eq(out, in[3])));
      return rf_or(rf_or(d1, d2), d3);
    }
    case PorFn::Query:
      return rf_or(rf_and(rf_flip(in[0]), rf_eq(out, rt_lit(1))),
                   rf_and(rf_not(rf_flip(in[0])), rf_eq(out, rt_lit(0))));
    case PorFn::Comp: {
      std::vector<std::string> zs;
      for (size_t j = 0; j < f.hs.size(); ++j) zs.push_back("z" + std::to_string(++ctr));
      std::vector<RlTermPtr> zterms;
      for (auto& z : zs) zterms.push_back(rt_var(z));
      RlFormulaPtr body;
      for (size_t j = 0; j < f.hs.size(); ++j) {
        RlFormulaPtr c = repr_rec(*f.hs[j], in, zterms[j], ctr);
        body = body ? rf_and(body, c) : c;
      }
      body = rf_and(body, repr_rec(*f.g, zterms, out, ctr));
      for (size_t j = f.hs.size(); j-- > 0;) {
        RlTermPtr bound = bound_to_term(*size_bound(*f.hs[j]), in);
        body = rf_quant(RlFormula::Exists, zs[j], QuantRange::LenLe, bound, body);
      }
      return body;
    }
    case PorFn::BRec:
      throw std::runtime_error("defining formulas for recursion are not supported");
  }
  throw std::logic_error("unreachable");
}

RlFormulaPtr build_repr_formula(const PorFn& f) {
  int n = arity(f);
  std::vector<RlTermPtr> in;
  for (int i = 1; i <= n; ++i) in.push_back(rt_var("x" + std::to_string(i)));
  int ctr = 0;
  return repr_rec(f, in, rt_var("y"), ctr);
}

// ---- representability checking ----

ReprReport check_representability(const RlFormula& F, const PorFn& f, int max_len,
                                  long long fuel, int coord_cap) {
  ReprReport rep;
  RlClass cls = classify(F);
  if (cls != RlClass::Sigma_b_1)
    rep.warnings.push_back("formula classifies as " + rl_class_name(cls) +
                           ", not Sigma_b_1");
  int n = arity(f);
  auto inputs = all_strings_upto(max_len);
  std::vector<size_t> idx(size_t(n), 0);
  while (true) {
    std::vector<BitString> args;
    for (int j = 0; j < n; ++j) args.push_back(inputs[idx[size_t(j)]]);
    std::ostringstream at;
    at << "at input (";
    for (int j = 0; j < n; ++j) at << (j ? "," : "") << show_bits(args[size_t(j)]);
    at << ")";

    Distribution dist = eval_dist(f, args, fuel, coord_cap);
    if (!(dist.diverge == Dyadic(0)))
      rep.violations.push_back("function diverges " + at.str());

    // candidate outputs: everything up to max_len, widened to cover the support
    size_t out_cap = size_t(max_len);
    for (auto& [v, w] : dist.weights) out_cap = std::max(out_cap, v.size());
    auto taus = all_strings_upto(int(out_cap));
    Environment env;
    for (int j = 0; j < n; ++j) env["x" + std::to_string(j + 1)] = args[size_t(j)];

    std::vector<CylinderSet> events;
    std::set<BitString> coordset;
    for (auto& tau : taus) {
      env["y"] = tau;
      events.push_back(eval_measure(F, env, coord_cap));
      for (auto& c : events.back().coords) coordset.insert(c);
    }
    for (auto& c : por_coords(f, args, fuel, coord_cap)) coordset.insert(c);
    std::vector<BitString> coords(coordset.begin(), coordset.end());
    if (int(coords.size()) > coord_cap)
      throw std::runtime_error("representability check exceeds the coordinate cap");

    for (size_t mask = 0; mask < (size_t(1) << coords.size()); ++mask) {
      std::map<BitString, int> tab;
      for (size_t i = 0; i < coords.size(); ++i) tab[coords[i]] = int((mask >> i) & 1);
      Oracle eta(tab);
      std::vector<size_t> sat;
      for (size_t k = 0; k < taus.size(); ++k)
        if (cyl_member(events[k], eta)) sat.push_back(k);
      if (sat.size() != 1) {
        rep.violations.push_back("formula admits " + std::to_string(sat.size()) +
                                 " outputs under one oracle " + at.str());
        rep.pass = false;
        break;
      }
      BitString fv = eval(f, args, eta, fuel);
      if (taus[sat[0]] != fv) {
        rep.violations.push_back("formula picks " + show_bits(taus[sat[0]]) +
                                 " but the function returns " + show_bits(fv) + " " + at.str());
        rep.pass = false;
        break;
      }
    }

    for (size_t k = 0; k < taus.size(); ++k) {
      Dyadic mu = cylinder_measure(events[k]);
      auto it = dist.weights.find(taus[k]);
      Dyadic p = it == dist.weights.end() ? Dyadic(0) : it->second;
      if (!(mu == p)) {
        rep.violations.push_back("measure " + to_string(mu) + " differs from probability " +
                                 to_string(p) + " for output " + show_bits(taus[k]) + " " +
                                 at.str());
        break;
      }
    }
    rep.cases_checked += (long long)taus.size();

    int j = 0;
    for (; j < n && ++idx[size_t(j)] == inputs.size(); ++j) idx[size_t(j)] = 0;
    if (j == n) break;
  }
  rep.pass = rep.violations.empty();
  return rep;
}

// ---- concrete syntax ----

namespace {

struct RlToken {
  enum Kind { Ident, Keyword, Quoted, Sym, End } kind;
  std::string text;
  size_t pos;
};

const std::set<std::string> kKeywords = {"eps", "flip", "sub", "in", "E",
                                         "A",   "Ew",   "Aw",  "Ei", "Ai"};

std::vector<RlToken> rl_lex(const std::string& src) {
  std::vector<RlToken> out;
  size_t i = 0;
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error("syntax error at offset " + std::to_string(i) + ": " + msg);
  };
  while (i < src.size()) {
    char c = src[i];
    if (isspace((unsigned char)c)) {
      ++i;
      continue;
    }
    size_t start = i;
    if (c == '"') {
      ++i;
      std::string bits;
      while (i < src.size() && src[i] != '"') {
        if (src[i] != '0' && src[i] != '1') fail("bit literals may only contain 0 and 1");
        bits += src[i++];
      }
      if (i == src.size()) fail("unterminated bit literal");
      ++i;
      out.push_back({RlToken::Quoted, bits, start});
      continue;
    }
    if (isalpha((unsigned char)c)) {
      std::string id;
      while (i < src.size() && (isalnum((unsigned char)src[i]) || src[i] == '_')) id += src[i++];
      out.push_back({kKeywords.count(id) ? RlToken::Keyword : RlToken::Ident, id, start});
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      out.push_back({RlToken::Sym, "->", start});
      i += 2;
      continue;
    }
    if (c == '<' && i + 1 < src.size() && src[i + 1] == '=') {
      out.push_back({RlToken::Sym, "<=", start});
      i += 2;
      continue;
    }
    if (std::string("^*=!&|().").find(c) != std::string::npos) {
      out.push_back({RlToken::Sym, std::string(1, c), start});
      ++i;
      continue;
    }
    fail(std::string("unexpected character '") + c + "'");
  }
  out.push_back({RlToken::End, "", src.size()});
  return out;
}

struct RlParser {
  std::vector<RlToken> toks;
  size_t at = 0;

  [[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error("syntax error at offset " + std::to_string(toks[at].pos) + ": " +
                             msg);
  }
  const RlToken& peek() const { return toks[at]; }
  bool is_sym(const std::string& s) const {
    return toks[at].kind == RlToken::Sym && toks[at].text == s;
  }
  bool is_kw(const std::string& s) const {
    return toks[at].kind == RlToken::Keyword && toks[at].text == s;
  }
  void expect_sym(const std::string& s) {
    if (!is_sym(s)) fail("expected '" + s + "'");
    ++at;
  }

  RlTermPtr factor() {
    if (is_kw("eps")) {
      ++at;
      return rt_eps();
    }
    if (peek().kind == RlToken::Quoted) {
      return rt_string(toks[at++].text);
    }
    if (peek().kind == RlToken::Ident) {
      return rt_var(toks[at++].text);
    }
    if (is_sym("(")) {
      ++at;
      RlTermPtr t = term();
      expect_sym(")");
      return t;
    }
    fail("expected a term");
  }
  RlTermPtr term() {
    RlTermPtr t = factor();
    while (is_sym("^") || is_sym("*")) {
      bool cat = toks[at++].text == "^";
      RlTermPtr u = factor();
      t = cat ? rt_cat(t, u) : rt_times(t, u);
    }
    return t;
  }

  RlFormulaPtr quantifier() {
    std::string kw = toks[at++].text;
    bool exists = kw[0] == 'E';
    if (peek().kind != RlToken::Ident) fail("expected a variable after the quantifier");
    std::string var = toks[at++].text;
    QuantRange range;
    RlTermPtr bound;
    if (kw == "E" || kw == "A") {
      if (is_sym("<=")) {
        ++at;
        range = QuantRange::LenLe;
        bound = term();
      } else {
        range = QuantRange::Unbounded;
      }
    } else {
      if (!is_kw("in")) fail("expected 'in'");
      ++at;
      range = kw[1] == 'w' ? QuantRange::Subword : QuantRange::InitialSub;
      bound = term();
    }
    expect_sym(".");
    RlFormulaPtr body = formula();
    return rf_quant(exists ? RlFormula::Exists : RlFormula::Forall, var, range, bound, body);
  }

  RlFormulaPtr atom() {
    if (peek().kind == RlToken::Keyword) {
      const std::string& kw = peek().text;
      if (kw == "flip") {
        ++at;
        expect_sym("(");
        RlTermPtr t = term();
        expect_sym(")");
        return rf_flip(t);
      }
      if (kw == "E" || kw == "A" || kw == "Ew" || kw == "Aw" || kw == "Ei" || kw == "Ai")
        return quantifier();
    }
    // a relational atom and a parenthesised formula can both open with '('
    size_t save = at;
    try {
      RlTermPtr lhs = term();
      if (is_sym("=")) {
        ++at;
        return rf_eq(lhs, term());
      }
      if (is_kw("sub")) {
        ++at;
        return rf_sub(lhs, term());
      }
    } catch (const std::runtime_error&) {
    }
    at = save;
    if (is_sym("(")) {
      ++at;
      RlFormulaPtr f = formula();
      expect_sym(")");
      return f;
    }
    fail("expected a formula");
  }

  RlFormulaPtr negation() {
    if (is_sym("!")) {
      ++at;
      return rf_not(negation());
    }
    return atom();
  }
  RlFormulaPtr conjunction() {
    RlFormulaPtr f = negation();
    while (is_sym("&")) {
      ++at;
      f = rf_and(f, negation());
    }
    return f;
  }
  RlFormulaPtr disjunction() {
    RlFormulaPtr f = conjunction();
    while (is_sym("|")) {
      ++at;
      f = rf_or(f, conjunction());
    }
    return f;
  }
  RlFormulaPtr formula() {
    RlFormulaPtr f = disjunction();
    if (is_sym("->")) {
      ++at;
      return rf_imp(f, formula());
    }
    return f;
  }
};

}  // namespace

RlTermPtr rl_parse_term(const std::string& src) {
  RlParser p{rl_lex(src)};
  RlTermPtr t = p.term();
  if (p.peek().kind != RlToken::End) p.fail("trailing input after the term");
  return t;
}

RlFormulaPtr rl_parse_formula(const std::string& src) {
  RlParser p{rl_lex(src)};
  RlFormulaPtr f = p.formula();
  if (p.peek().kind != RlToken::End) p.fail("trailing input after the formula");
  return f;
}

std::string rl_show_term(const RlTerm& t) {
  auto wrap = [](const RlTerm& u) {
    std::string s = rl_show_term(u);
    return u.kind == RlTerm::Cat || u.kind == RlTerm::Times ? "(" + s + ")" : s;
  };
  switch (t.kind) {
    case RlTerm::Var: return t.var;
    case RlTerm::Eps: return "eps";
    case RlTerm::Lit0: return "\"0\"";
    case RlTerm::Lit1: return "\"1\"";
    case RlTerm::Cat: return rl_show_term(*t.a) + " ^ " + wrap(*t.b);
    case RlTerm::Times: return rl_show_term(*t.a) + " * " + wrap(*t.b);
  }
  throw std::logic_error("unreachable");
}

// precedence: -> and quantifiers 1, | 2, & 3, ! 4, atoms 5
static std::string show_rec(const RlFormula& f, int ctx) {
  auto wrap = [&](int prec, std::string s) { return prec < ctx ? "(" + s + ")" : s; };
  switch (f.kind) {
    case RlFormula::Flip: return "flip(" + rl_show_term(*f.t) + ")";
    case RlFormula::Eq: return rl_show_term(*f.t) + " = " + rl_show_term(*f.s);
    case RlFormula::SubInit: return rl_show_term(*f.t) + " sub " + rl_show_term(*f.s);
    case RlFormula::Not: return wrap(4, "!" + show_rec(*f.f, 4));
    case RlFormula::And: return wrap(3, show_rec(*f.f, 3) + " & " + show_rec(*f.g, 4));
    case RlFormula::Or: return wrap(2, show_rec(*f.f, 2) + " | " + show_rec(*f.g, 3));
    case RlFormula::Imp: return wrap(1, show_rec(*f.f, 2) + " -> " + show_rec(*f.g, 1));
    case RlFormula::Exists:
    case RlFormula::Forall: {
      bool ex = f.kind == RlFormula::Exists;
      std::string head;
      switch (f.range) {
        case QuantRange::Unbounded: head = (ex ? "E " : "A ") + f.var; break;
        case QuantRange::LenLe:
          head = (ex ? "E " : "A ") + f.var + " <= " + rl_show_term(*f.t);
          break;
        case QuantRange::Subword:
          head = (ex ? "Ew " : "Aw ") + f.var + " in " + rl_show_term(*f.t);
          break;
        case QuantRange::InitialSub:
          head = (ex ? "Ei " : "Ai ") + f.var + " in " + rl_show_term(*f.t);
          break;
      }
      return wrap(1, head + " . " + show_rec(*f.f, 1));
    }
  }
  throw std::logic_error("unreachable");
}

std::string rl_show(const RlFormula& f) { return show_rec(f, 1); }

}  // namespace porlab
