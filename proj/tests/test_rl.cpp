#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <functional>
#include <random>

#include "doctest.h"
#include "porlab/rl.hpp"

using namespace porlab;

namespace {

// deterministic total oracle derived from a seed
struct HashOracle : OracleIface {
  uint64_t seed;
  explicit HashOracle(uint64_t s) : seed(s) {}
  int query(const BitString& coord) const override {
    uint64_t h = seed ^ 0x9e3779b97f4a7c15ULL;
    for (char c : coord) h = (h ^ uint64_t(c)) * 0x100000001b3ULL;
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
    return int(h & 1);
  }
};

struct Sb0Gen {
  std::mt19937_64 rng;
  explicit Sb0Gen(uint64_t seed) : rng(seed) {}

  RlTermPtr term(int depth, const std::vector<std::string>& scope) {
    switch (depth == 0 ? rng() % 4 : rng() % 6) {
      case 0: return rt_eps();
      case 1: return rt_lit(0);
      case 2: return rt_lit(1);
      case 3: return rt_var(scope[rng() % scope.size()]);
      case 4: return rt_cat(term(depth - 1, scope), term(depth - 1, scope));
      default: return rt_times(term(depth - 1, scope), term(depth - 1, scope));
    }
  }

  RlFormulaPtr formula(int depth, std::vector<std::string> scope, int& next_var) {
    switch (depth == 0 ? rng() % 3 : rng() % 8) {
      case 0: return rf_flip(term(1, scope));
      case 1: return rf_eq(term(1, scope), term(1, scope));
      case 2: return rf_sub(term(1, scope), term(1, scope));
      case 3: return rf_not(formula(depth - 1, scope, next_var));
      case 4:
        return rf_and(formula(depth - 1, scope, next_var), formula(depth - 1, scope, next_var));
      case 5:
        return rf_or(formula(depth - 1, scope, next_var), formula(depth - 1, scope, next_var));
      case 6:
        return rf_imp(formula(depth - 1, scope, next_var), formula(depth - 1, scope, next_var));
      default: {
        std::string v = "v" + std::to_string(next_var++);
        RlTermPtr bound = term(1, scope);
        bool ex = rng() % 2 == 0;
        QuantRange r = rng() % 2 ? QuantRange::Subword : QuantRange::InitialSub;
        scope.push_back(v);
        RlFormulaPtr body = formula(depth - 1, scope, next_var);
        return rf_quant(ex ? RlFormula::Exists : RlFormula::Forall, v, r, bound, body);
      }
    }
  }
};

// 200 measurable random subword-quantified formulas with a fixed environment
std::vector<std::pair<RlFormulaPtr, Environment>> sb0_corpus() {
  static std::vector<std::pair<RlFormulaPtr, Environment>> corpus = [] {
    std::vector<std::pair<RlFormulaPtr, Environment>> out;
    Sb0Gen gen(20240817);
    while (out.size() < 200) {
      Environment env{{"x", gen.rng() % 2 ? "10" : "0"}, {"y", gen.rng() % 2 ? "1" : "01"}};
      int next_var = 0;
      RlFormulaPtr f = gen.formula(int(gen.rng() % 4) + 1, {"x", "y"}, next_var);
      if (classify(*f) != RlClass::Sigma_b_0) continue;
      try {
        eval_measure(*f, env, 14);
      } catch (const std::runtime_error&) {
        continue;
      }
      out.emplace_back(f, env);
    }
    return out;
  }();
  return corpus;
}

}  // namespace

TEST_CASE("term evaluation") {
  Environment env{{"x", "01"}};
  CHECK(eval_term(*rt_eps(), env) == "");
  CHECK(eval_term(*rl_parse_term("x ^ \"1\""), env) == "011");
  CHECK(eval_term(*rl_parse_term("\"1\" * x"), {{"x", "010"}}) == "111");
  CHECK(eval_term(*rl_parse_term("(x ^ x) * \"11\""), env) == "01010101");
  CHECK_THROWS(eval_term(*rt_var("z"), env));
}

TEST_CASE("parsing shapes") {
  RlFormulaPtr f = rl_parse_formula("flip(\"01\")");
  CHECK(f->kind == RlFormula::Flip);
  CHECK(f->t->kind == RlTerm::Cat);

  f = rl_parse_formula("E x <= y . x = y");
  CHECK(f->kind == RlFormula::Exists);
  CHECK(f->range == QuantRange::LenLe);

  f = rl_parse_formula("\"0\" sub eps");
  CHECK(f->kind == RlFormula::SubInit);

  f = rl_parse_formula("!a = b & c = d | e = f -> g = h");
  CHECK(f->kind == RlFormula::Imp);
  CHECK(f->f->kind == RlFormula::Or);
  CHECK(f->f->f->kind == RlFormula::And);
  CHECK(f->f->f->f->kind == RlFormula::Not);

  f = rl_parse_formula("(x ^ y) = z");
  CHECK(f->kind == RlFormula::Eq);
  f = rl_parse_formula("(x = y)");
  CHECK(f->kind == RlFormula::Eq);
  f = rl_parse_formula("Ew u in x ^ y . flip(u)");
  CHECK(f->range == QuantRange::Subword);
  f = rl_parse_formula("Ai u in x . u sub x");
  CHECK(f->kind == RlFormula::Forall);
  CHECK(f->range == QuantRange::InitialSub);

  CHECK_THROWS_WITH_AS(rl_parse_formula("x ="), doctest::Contains("syntax error"),
                       std::runtime_error);
  CHECK_THROWS(rl_parse_formula("flip(x"));
  CHECK_THROWS(rl_parse_formula("x = y extra"));
  CHECK_THROWS(rl_parse_formula("E x <= t"));
  CHECK_THROWS(rl_parse_term("\"02\""));
}

TEST_CASE("standard semantics") {
  Oracle eta({{"", 1}});
  Environment empty;
  CHECK(eval_standard(*rl_parse_formula("flip(eps)"), empty, eta) == 1);
  CHECK(eval_standard(*rl_parse_formula("eps = eps"), empty, eta) == 1);
  CHECK(eval_standard(*rl_parse_formula("\"0\" sub eps"), empty, eta) == 0);
  CHECK(eval_standard(*rl_parse_formula("E x <= \"11\" . x = \"10\""), empty, eta) == 1);
  CHECK(eval_standard(*rl_parse_formula("A x <= \"11\" . x sub \"11\""), empty, eta) == 0);
  CHECK(eval_standard(*rl_parse_formula("Ai x in \"11\" . x sub \"11\""), empty, eta) == 1);
  CHECK(eval_standard(*rl_parse_formula("Ew x in \"00\" . x = \"0\""), empty, eta) == 1);
  CHECK(eval_standard(*rl_parse_formula("eps = eps -> flip(eps)"), empty, eta) == 1);
  CHECK(eval_standard(*rl_parse_formula("flip(eps) -> eps = \"1\""), empty, eta) == 0);
  CHECK_THROWS(eval_standard(*rl_parse_formula("E x . x = x"), empty, eta));
}

TEST_CASE("measure semantics frozen values") {
  Environment empty;
  CylinderSet c = eval_measure(*rl_parse_formula("flip(eps)"), empty);
  CHECK(cylinder_measure(c) == Dyadic::pow2(1));
  CHECK(cylinder_measure(eval_measure(*rl_parse_formula("eps = eps"), empty)) == Dyadic(1));
  CHECK(cylinder_measure(eval_measure(*rl_parse_formula("flip(eps) & flip(\"0\")"), empty)) ==
        Dyadic::pow2(2));
  CHECK(cylinder_measure(eval_measure(*rl_parse_formula("flip(eps) | !flip(eps)"), empty)) ==
        Dyadic(1));
  CHECK(cylinder_measure(eval_measure(*rl_parse_formula("E x <= \"1\" . flip(x)"), empty)) ==
        Dyadic::ratio(7, 3));
}

TEST_CASE("standard and measure semantics agree on the random corpus") {
  CHECK(sb0_corpus().size() == 200);
  for (auto& [f, env] : sb0_corpus()) {
    CylinderSet c = eval_measure(*f, env, 14);
    for (uint64_t k = 0; k < 20; ++k) {
      HashOracle eta(k);
      if ((eval_standard(*f, env, eta) == 1) != cyl_member(c, eta))
        FAIL("semantics disagree on ", rl_show(*f));
    }
  }
}

TEST_CASE("complement law on the random corpus") {
  for (auto& [f, env] : sb0_corpus()) {
    Dyadic mu = cylinder_measure(eval_measure(*f, env, 14));
    Dyadic nu = cylinder_measure(eval_measure(*rf_not(f), env, 14));
    CHECK(mu + nu == Dyadic(1));
  }
}

TEST_CASE("bounded existential dominates every instantiation") {
  std::mt19937_64 rng(7);
  Sb0Gen gen(42);
  for (int trial = 0; trial < 40; ++trial) {
    Environment env{{"x", "10"}, {"y", "01"}};
    int next_var = 0;
    RlFormulaPtr body = gen.formula(2, {"x", "y", "u"}, next_var);
    RlTermPtr bound = gen.term(1, {"x", "y"});
    RlFormulaPtr ex;
    try {
      ex = rf_quant(RlFormula::Exists, "u", QuantRange::LenLe, bound, body);
    } catch (const std::invalid_argument&) {
      continue;
    }
    CylinderSet whole;
    try {
      whole = eval_measure(*ex, env, 14);
    } catch (const std::runtime_error&) {
      continue;
    }
    BitString bv = eval_term(*bound, env);
    for (auto& u : all_strings_upto(int(bv.size()))) {
      Environment inner = env;
      inner["u"] = u;
      CHECK(cyl_subset(eval_measure(*body, inner, 14), whole));
    }
  }
}

TEST_CASE("classification") {
  CHECK(classify(*rl_parse_formula("eps = eps")) == RlClass::Sigma_b_0);
  CHECK(classify(*rl_parse_formula("Ew u in x . flip(u)")) == RlClass::Sigma_b_0);
  CHECK(classify(*rl_parse_formula("E x <= t . x = t")) == RlClass::Sigma_b_1);
  CHECK(classify(*rl_parse_formula("E x <= t . E z <= t . x = z")) == RlClass::Sigma_b_1);
  CHECK(classify(*rl_parse_formula("A x <= t . x = t")) == RlClass::Other);
  CHECK(classify(*rl_parse_formula("E x <= t . A z <= t . x = z")) == RlClass::Other);
  CHECK(classify(*rl_parse_formula("(E x <= t . x = t) | (E z <= t . z = t)")) ==
        RlClass::ExtendedSigma_b_1);
  CHECK(classify(*rl_parse_formula("Ew u in t . E x <= u . x = u")) ==
        RlClass::ExtendedSigma_b_1);
  CHECK(classify(*rl_parse_formula("!(E x <= t . x = t)")) == RlClass::Other);
  CHECK(rl_class_name(RlClass::ExtendedSigma_b_1) == "extended_Sigma_b_1");
}

TEST_CASE("defining formulas match the schema") {
  CHECK(rl_show(*build_repr_formula(*por_e())) == "x1 = x1 & y = eps");
  CHECK(rl_show(*build_repr_formula(*por_proj(2, 1))) == "x2 = x2 & y = x1");
  CHECK(rl_show(*build_repr_formula(*por_succ(1))) == "y = x1 ^ \"1\"");
  CHECK(rl_show(*build_repr_formula(*por_query())) ==
        "flip(x1) & y = \"1\" | !flip(x1) & y = \"0\"");
  CHECK(rl_show(*build_repr_formula(*por_cond())) ==
        "x1 = eps & y = x2 | (E z1 <= x1 . x1 = z1 ^ \"0\" & y = x3) | "
        "(E z2 <= x1 . x1 = z2 ^ \"1\" & y = x4)");
  CHECK(rl_show(*build_repr_formula(*por_comp(por_succ(1), {por_proj(1, 1)}))) ==
        "E z1 <= x1 . z1 = x1 & y = z1 ^ \"1\"");

  auto lib = por_stdlib();
  CHECK_THROWS(build_repr_formula(*lib["eq"]));

  std::vector<PorPtr> fns{por_e(),
                          por_proj(2, 1),
                          por_succ(1),
                          por_cond(),
                          por_query(),
                          por_comp(por_succ(1), {por_proj(1, 1)}),
                          por_comp(por_query(), {por_query()}),
                          por_comp(por_e(), {por_succ(1)})};
  for (auto& f : fns) {
    RlClass c = classify(*build_repr_formula(*f));
    CHECK(c != RlClass::Other);
  }
}

TEST_CASE("defining formula round trips through the printer") {
  std::vector<PorPtr> fns{por_e(), por_cond(), por_query(),
                          por_comp(por_query(), {por_query()})};
  for (auto& f : fns) {
    std::string s = rl_show(*build_repr_formula(*f));
    CHECK(rl_show(*rl_parse_formula(s)) == s);
  }
  for (auto& [f, env] : sb0_corpus()) {
    std::string s = rl_show(*f);
    CHECK(rl_show(*rl_parse_formula(s)) == s);
  }
}

TEST_CASE("representability of the base functions") {
  ReprReport r = check_representability(*build_repr_formula(*por_query()), *por_query(), 2);
  CHECK(r.pass);
  CHECK(r.violations.empty());

  r = check_representability(*build_repr_formula(*por_e()), *por_e(), 3);
  CHECK(r.pass);

  r = check_representability(*build_repr_formula(*por_comp(por_e(), {por_succ(1)})),
                             *por_comp(por_e(), {por_succ(1)}), 2);
  CHECK(r.pass);

  // swapping the two outputs must be caught by the pointwise condition
  RlFormulaPtr bad = rl_parse_formula("flip(x1) & y = \"0\" | !flip(x1) & y = \"1\"");
  r = check_representability(*bad, *por_query(), 1);
  CHECK(!r.pass);
  CHECK(!r.violations.empty());

  // a formula that admits two outputs fails uniqueness
  RlFormulaPtr loose = rl_parse_formula("y sub \"1\"");
  r = check_representability(*loose, *por_e(), 1);
  CHECK(!r.pass);
}

TEST_CASE("query formula measures") {
  RlFormulaPtr fq = build_repr_formula(*por_query());
  Environment env{{"x1", "01"}, {"y", "1"}};
  CylinderSet one = eval_measure(*fq, env);
  env["y"] = "0";
  CylinderSet zero = eval_measure(*fq, env);
  CHECK(cylinder_measure(one) == Dyadic::pow2(1));
  CHECK(cylinder_measure(zero) == Dyadic::pow2(1));
  CHECK(cylinder_measure(cyl_union(one, zero)) == Dyadic(1));
}

TEST_CASE("quantifier caps are errors") {
  Environment empty;
  Oracle eta({}, OraclePolicy::Zero);
  RlFormulaPtr f = rf_quant(RlFormula::Exists, "u", QuantRange::LenLe,
                            rt_string(BitString(17, '1')), rf_eq(rt_var("u"), rt_var("u")));
  CHECK_THROWS_WITH_AS(eval_standard(*f, empty, eta), doctest::Contains("cap"),
                       std::runtime_error);
  CHECK_THROWS(eval_measure(*f, empty));
  CHECK_THROWS(rf_quant(RlFormula::Exists, "u", QuantRange::LenLe, rt_var("u"),
                        rf_eq(rt_var("u"), rt_var("u"))));
}
