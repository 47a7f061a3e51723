#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "porlab/lambda.hpp"
#include "porlab/bitstring.hpp"
#include "porlab/oracle.hpp"
#include "porlab/por.hpp"

using namespace porlab;

namespace {

FlipTable random_table(int max_len, unsigned seed) {
  std::mt19937_64 rng(seed);
  FlipTable t;
  for (const auto& s : all_strings_upto(max_len)) t[s] = int(rng() & 1);
  return t;
}

BitString run(const LTermPtr& t, const FlipTable& tab = {}) {
  return denumeral(normalize(t, tab));
}

LTermPtr apply_numerals(const LTermPtr& f, const std::vector<BitString>& args) {
  std::vector<LTermPtr> ns;
  for (const auto& a : args) ns.push_back(lt_numeral(a));
  return lt_apps(f, ns);
}

std::vector<std::vector<BitString>> tuples_upto(int arity, int max_len) {
  auto alls = all_strings_upto(max_len);
  std::vector<std::vector<BitString>> out{{}};
  for (int i = 0; i < arity; ++i) {
    std::vector<std::vector<BitString>> next;
    for (const auto& tup : out)
      for (const auto& s : alls) {
        auto t2 = tup;
        t2.push_back(s);
        next.push_back(t2);
      }
    out = next;
  }
  return out;
}

BitString flag(bool b) { return b ? "1" : "0"; }

}  // namespace

TEST_CASE("types print and compare") {
  CHECK(ty_show(ty_s()) == "s");
  CHECK(ty_show(ty_arrow(ty_s(), ty_s())) == "s => s");
  CHECK(ty_show(ty_arrow(ty_arrow(ty_s(), ty_s()), ty_s())) == "(s => s) => s");
  CHECK(ty_show(const_type(LConst::Rec)) ==
        "s => (s => s => s) => (s => s => s) => (s => s) => s => s");
  CHECK(ty_equal(const_type(LConst::Cat), ty_arrow(ty_s(), ty_arrow(ty_s(), ty_s()))));
  CHECK_FALSE(ty_equal(ty_s(), ty_arrow(ty_s(), ty_s())));
}

TEST_CASE("typecheck accepts the declared fragment and reports offenders") {
  CHECK(ty_show(typecheck(lambda_parse("\\x:s. eps"))) == "s => s");
  CHECK(ty_show(typecheck(lambda_parse("Cond eps 0 1"))) == "s => s");
  CHECK(ty_show(typecheck(lambda_parse("Flipcoin"))) == "s => s");
  CHECK(ty_show(typecheck(lambda_parse("\\f:s => s. \\x:s. f (f x)"))) == "(s => s) => s => s");
  CHECK_THROWS_WITH_AS(typecheck(lambda_parse("eps eps")), doctest::Contains("type error"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(typecheck(lambda_parse("Tail Flipcoin")), doctest::Contains("type error"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(typecheck(lambda_parse("x")), doctest::Contains("unbound"),
                       std::runtime_error);
}

TEST_CASE("numerals are left-nested appends onto eps") {
  LTermPtr n = lt_numeral("01");
  REQUIRE(is_numeral(n));
  CHECK(lambda_show(n) == "01");
  REQUIRE(n->kind == LTerm::Kind::App);
  CHECK(n->arg->cst == LConst::One);
  LTermPtr inner = n->fn->arg;
  REQUIRE(inner->kind == LTerm::Kind::App);
  CHECK(inner->arg->cst == LConst::Zero);
  CHECK(inner->fn->arg->cst == LConst::Eps);
  CHECK(value_of(n) == BitString("01"));
  for (const auto& s : all_strings_upto(5)) CHECK(denumeral(lt_numeral(s)) == s);
  CHECK(lambda_show(lambda_parse("01")) == "01");
  CHECK(run(lambda_parse("o 0 1")) == "01");
  CHECK(is_numeral(normalize(lambda_parse("o 0 1"), {})));
  CHECK(is_numeral(normalize(lambda_parse("o 01 eps"), {})));
  CHECK_THROWS_WITH_AS(denumeral(lambda_parse("\\x:s. x")), doctest::Contains("not a numeral"),
                       std::runtime_error);
}

TEST_CASE("computation rules on the string constants") {
  CHECK(run(lambda_parse("Tail eps")) == "");
  CHECK(run(lambda_parse("Tail 011")) == "01");
  CHECK(run(lambda_parse("Trunc 011 eps")) == "");
  CHECK(run(lambda_parse("Trunc 0110 11")) == "01");
  CHECK(run(lambda_parse("Trunc 01 1111")) == "01");
  CHECK(run(lambda_parse("Cond eps 1 0 0")) == "1");
  CHECK(run(lambda_parse("Cond 10 1 0 1")) == "0");
  CHECK(run(lambda_parse("Cond 11 1 0 01")) == "01");
  CHECK(run(lambda_parse("Times 01 111")) == "010101");
  CHECK(run(lambda_parse("Times 01 eps")) == "");
  CHECK(run(lambda_parse("Flipcoin 01"), {{"01", 1}}) == "1");
  CHECK(run(lambda_parse("Flipcoin 01"), {{"01", 0}}) == "0");
  CHECK_THROWS_AS(run(lambda_parse("Flipcoin 11"), {{"01", 1}}), OracleMiss);
}

TEST_CASE("beta and eta steps, type stability, fuel") {
  CHECK(run(lambda_parse("(\\x:s. o x 1) 0")) == "01");
  CHECK(lambda_show(normalize(lambda_parse("\\x:s. (\\y:s. y) x"), {})) == "\\x:s. x");
  CHECK(lambda_show(normalize(lambda_parse("\\x:s. Tail x"), {})) == "Tail");
  auto lib = lambda_stdlib();
  CHECK(denumeral(normalize(apply_numerals(lib.at("Eq"), {"01", "01"}), {}, kDefaultFuel,
                            true)) == "1");
  CHECK(denumeral(normalize(apply_numerals(lib.at("Conc"), {"10", "11"}), {}, kDefaultFuel,
                            true)) == "1011");
  CHECK_THROWS_AS(normalize(apply_numerals(lib.at("Eq"), {"111", "111"}), {}, 10), FuelExhausted);
}

TEST_CASE("derived combinators, exhaustive to length 4") {
  auto lib = lambda_stdlib();
  auto all = all_strings_upto(4);
  for (const auto& x : all) {
    BitString bx = x.empty() ? BitString() : BitString(1, x.back());
    CHECK(run(lt_app(lib.at("B"), lt_numeral(x))) == bx);
    BitString nx = x.empty() ? BitString() : flag(x.back() == '0');
    CHECK(run(lt_app(lib.at("BNeg"), lt_numeral(x))) == nx);
    CHECK(run(lt_app(lib.at("Eps"), lt_numeral(x))) == flag(x.empty()));
    CHECK(run(lt_app(lib.at("Bool"), lt_numeral(x))) == flag(x.size() == 1));
    CHECK(run(lt_app(lib.at("Zero"), lt_numeral(x))) == flag(x == "0"));
  }
  for (const auto& x : all)
    for (const auto& y : all) {
      BitString bx = x.empty() ? BitString() : BitString(1, x.back());
      BitString by = y.empty() ? BitString() : BitString(1, y.back());
      BitString expect_or = bx == "1" ? "1" : by;
      BitString expect_and = bx.empty() ? BitString() : (bx == "0" ? "0" : by);
      if (run(apply_numerals(lib.at("BOr"), {x, y})) != expect_or)
        FAIL("BOr broken at ", show_bits(x), ",", show_bits(y));
      if (run(apply_numerals(lib.at("BAnd"), {x, y})) != expect_and)
        FAIL("BAnd broken at ", show_bits(x), ",", show_bits(y));
      if (run(apply_numerals(lib.at("Conc"), {x, y})) != concat(x, y))
        FAIL("Conc broken at ", show_bits(x), ",", show_bits(y));
      if (run(apply_numerals(lib.at("Times"), {x, y})) != times(x, y))
        FAIL("Times broken at ", show_bits(x), ",", show_bits(y));
      if (run(apply_numerals(lib.at("Sub"), {x, y})) != flag(is_initial_subword(x, y)))
        FAIL("Sub broken at ", show_bits(x), ",", show_bits(y));
      if (run(apply_numerals(lib.at("Eq"), {x, y})) != flag(x == y))
        FAIL("Eq broken at ", show_bits(x), ",", show_bits(y));
    }
  CHECK(run(apply_numerals(lib.at("Eq"), {"01", "01"})) == "1");
  CHECK(run(apply_numerals(lib.at("Sub"), {"0", "01"})) == "1");
  CHECK(run(lt_app(lib.at("Eps"), lt_numeral(""))) == "1");
  CHECK(run(lt_app(lib.at("Eps"), lt_numeral("0"))) == "0");
}

TEST_CASE("Bool of a coin flip is always the numeral 1") {
  auto lib = lambda_stdlib();
  for (unsigned seed : {1u, 2u, 3u}) {
    FlipTable tab = random_table(3, seed);
    for (const auto& s : all_strings_upto(3)) {
      LTermPtr t = lt_app(lib.at("Bool"), lt_app(lt_const(LConst::Flipcoin), lt_numeral(s)));
      CHECK(run(t, tab) == "1");
    }
  }
}

TEST_CASE("recursion clips every result at its bound") {
  auto lib = por_stdlib();
  FlipTable empty;
  for (const char* name : {"conc", "tail", "trunc", "sub", "times"}) {
    PorPtr f = lib.at(name);
    LTermPtr t = por_to_lambda(*f);
    BoundPtr bound = size_bound(*f);
    for (const auto& args : tuples_upto(arity(*f), 2)) {
      BitString out = denumeral(normalize(apply_numerals(t, args), empty));
      if (out.size() > bt_eval(*bound, args).size())
        FAIL("bound violated by ", name, " at ", show_bits(args[0]));
    }
  }
}

TEST_CASE("por translations evaluate like the por functions") {
  auto lib = por_stdlib();
  std::vector<std::pair<std::string, PorPtr>> fns = {
      {"E", por_e()},          {"P21", por_proj(2, 1)},   {"S1", por_succ(1)},
      {"C", por_cond()},       {"Q", por_query()},        {"tail", lib.at("tail")},
      {"trunc", lib.at("trunc")}, {"conc", lib.at("conc")}, {"sub", lib.at("sub")},
      {"eq", lib.at("eq")},    {"times", lib.at("times")}, {"band", lib.at("band")},
      {"coinxor", lib.at("coinxor")},
  };
  for (const auto& [name, f] : fns) {
    LTermPtr t = por_to_lambda(*f);
    typecheck(t);
    int ar = arity(*f);
    int max_len = ar >= 4 ? 2 : 3;
    bool uses_oracle = name == "Q" || name == "coinxor";
    std::vector<unsigned> seeds = uses_oracle
                                      ? std::vector<unsigned>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}
                                      : std::vector<unsigned>{1};
    for (unsigned seed : seeds) {
      FlipTable tab = random_table(6, seed);
      Oracle eta(tab);
      for (const auto& args : tuples_upto(ar, max_len)) {
        BitString want = eval(*f, args, eta);
        BitString got = denumeral(normalize(apply_numerals(t, args), tab));
        if (want != got)
          FAIL("translation of ", name, " differs at ", show_bits(args[0]), ": ",
               show_bits(want), " vs ", show_bits(got));
      }
    }
  }
}

TEST_CASE("extraction returns base functions for their direct translations") {
  CHECK(lambda_to_por(lambda_parse("\\x:s. eps"))->kind == PorFn::E);
  CHECK(lambda_to_por(lt_const(LConst::Flipcoin))->kind == PorFn::Query);
  CHECK(lambda_to_por(lt_const(LConst::Cond))->kind == PorFn::Cond);
  CHECK(lambda_to_por(lambda_parse("\\x:s. o x 1"))->kind == PorFn::Succ);
  CHECK(lambda_to_por(lambda_parse("\\x:s. \\y:s. x"))->kind == PorFn::Proj);
}

TEST_CASE("extraction round trips the translations extensionally") {
  auto lib = por_stdlib();
  std::vector<std::pair<std::string, PorPtr>> fns = {
      {"E", por_e()},       {"S1", por_succ(1)},      {"Q", por_query()},
      {"tail", lib.at("tail")}, {"conc", lib.at("conc")}, {"sub", lib.at("sub")},
      {"eq", lib.at("eq")}, {"band", lib.at("band")}, {"coinxor", lib.at("coinxor")},
  };
  for (const auto& [name, f] : fns) {
    PorPtr g = lambda_to_por(por_to_lambda(*f));
    CHECK(arity(*g) == arity(*f));
    for (unsigned seed : {11u, 12u}) {
      Oracle eta(random_table(6, seed));
      for (const auto& args : tuples_upto(arity(*f), 2)) {
        if (eval(*f, args, eta) != eval(*g, args, eta))
          FAIL("round trip of ", name, " differs at ", show_bits(args[0]));
      }
    }
  }
}

TEST_CASE("a hand-written recursion extracts to bounded recursion") {
  LTermPtr t = lambda_parse(
      "\\x:s. \\y:s. Rec eps (\\w:s. \\p:s. o p 00) (\\w:s. \\p:s. o p 11) "
      "(\\w:s. o (Times 11 w) 11) y");
  PorPtr g = lambda_to_por(t);
  REQUIRE(g->kind == PorFn::BRec);
  Oracle z({}, OraclePolicy::Zero);
  CHECK(eval(*g, {"", "10"}, z) == "1100");
  CHECK(run(apply_numerals(t, {"", "10"})) == "1100");
  CHECK(eval(*g, {"1", "111"}, z) == "111111");
}

TEST_CASE("extraction rejects terms outside the fragment") {
  CHECK_THROWS_WITH_AS(lambda_to_por(lambda_parse("eps")), doctest::Contains("single string"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(lambda_to_por(lambda_parse("\\f:s => s. \\x:s. f x")),
                       doctest::Contains("higher-order"), std::runtime_error);
  CHECK_THROWS_WITH_AS(
      lambda_to_por(lambda_parse(
          "\\x:s. Rec x (\\w:s. \\p:s. p) (\\w:s. \\p:s. p) (\\w:s. w) x")),
      doctest::Contains("schema"), std::runtime_error);
  CHECK_THROWS_WITH_AS(
      lambda_to_por(lambda_parse(
          "\\x:s. \\y:s. Rec x (\\w:s. \\p:s. p) (\\w:s. \\p:s. p) (\\w:s. Tail w) y")),
      doctest::Contains("bound term"), std::runtime_error);
  CHECK_THROWS_AS(lambda_to_por(lambda_parse("\\x:s. Flipcoin Flipcoin")), std::runtime_error);
}

TEST_CASE("printing and parsing round trip") {
  for (const auto& [name, t] : lambda_stdlib()) {
    std::string s = lambda_show(t);
    CHECK(lambda_show(lambda_parse(s)) == s);
  }
  for (const auto& [name, f] : por_stdlib()) {
    std::string s = lambda_show(por_to_lambda(*f));
    CHECK(lambda_show(lambda_parse(s)) == s);
  }
  CHECK(lambda_show(lambda_stdlib().at("B")) == "\\x:s. Cond x eps 0 1");
  CHECK(lambda_show(lambda_parse("\\f:s => s. \\x:s. f (f x)")) ==
        "\\f:s => s. \\x:s. f (f x)");
  CHECK_THROWS_WITH_AS(lambda_parse("\\x:s"), doctest::Contains("syntax error"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(lambda_parse("Tail (x"), doctest::Contains("syntax error"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(lambda_parse("2"), doctest::Contains("syntax error"), std::runtime_error);
  CHECK_THROWS_WITH_AS(lambda_parse("\\o:s. o"), doctest::Contains("reserved"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(lambda_parse(""), doctest::Contains("syntax error"), std::runtime_error);
}
