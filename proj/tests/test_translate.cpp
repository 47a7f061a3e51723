#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "porlab/translate.hpp"

using namespace porlab;

namespace {

BitString word(size_t mask, size_t len) {
  BitString w;
  for (size_t i = 0; i < len; ++i) w += char('0' + ((mask >> i) & 1));
  return w;
}

Store store_of(const std::vector<BitString>& inputs) {
  Store s;
  for (size_t i = 0; i < inputs.size(); ++i) s.set("X" + std::to_string(i + 1), inputs[i]);
  return s;
}

// reference encoder built by hand from the pair scheme
BitString slow_encode(const std::vector<std::pair<BitString, int>>& entries) {
  BitString out;
  for (const auto& [k, v] : entries) {
    for (char c : k) out += (c == '1') ? "11" : "10";
    out += "01";
    out += v ? "11" : "10";
    out += "00";
  }
  return out;
}

bool assigns_input_register(const SifpStmt& s) {
  switch (s.kind) {
    case SifpStmt::Assign:
      return s.reg[0] == 'X';
    case SifpStmt::Seq:
      return assigns_input_register(*s.a) || assigns_input_register(*s.b);
    case SifpStmt::While:
      return assigns_input_register(*s.a);
    default:
      return false;
  }
}

bool expr_mentions(const SifpExpr& e, const std::string& reg) {
  switch (e.kind) {
    case SifpExpr::Eps:
      return false;
    case SifpExpr::App:
    case SifpExpr::Not:
      return expr_mentions(*e.e, reg);
    case SifpExpr::Reg:
      return e.reg == reg;
    case SifpExpr::Sub:
    case SifpExpr::And:
      return e.reg == reg || expr_mentions(*e.e, reg);
  }
  return false;
}

bool stmt_mentions(const SifpStmt& s, const std::string& reg) {
  switch (s.kind) {
    case SifpStmt::Assign:
      return s.reg == reg || expr_mentions(*s.e, reg);
    case SifpStmt::Seq:
      return stmt_mentions(*s.a, reg) || stmt_mentions(*s.b, reg);
    case SifpStmt::While:
      return expr_mentions(*s.e, reg) || stmt_mentions(*s.a, reg);
    case SifpStmt::Flip:
      return expr_mentions(*s.e, reg);
    case SifpStmt::RandBit:
      return false;
  }
  return false;
}

// every stage of a bundle, as exact distributions at the given fuel
std::vector<Distribution> stage_dists(const PipelineBundle& b, const std::vector<BitString>& in,
                                      long long fuel) {
  std::vector<Distribution> out;
  out.push_back(eval_dist(*b.source, in, fuel));
  out.push_back(run_ra_dist(*b.stage_ra, store_of(in), fuel));
  out.push_back(run_la_dist(*b.stage_la, store_of(in), fuel));
  out.push_back(run_dist(b.stage_od.spec, od_init(b.stage_od, in), fuel));
  out.push_back(run_dist(b.stage_stm, od_init(b.stage_stm, b.stage_od.tapes, in), fuel));
  out.push_back(run_dist(b.stage_ptm, od_init_ptm(b.stage_ptm, b.stage_od.tapes, in), fuel));
  return out;
}

void check_bundle_on(const PipelineBundle& b, const std::vector<BitString>& in,
                     long long fuel = 100000) {
  std::vector<Distribution> d = stage_dists(b, in, fuel);
  for (size_t i = 1; i < d.size(); ++i) {
    CAPTURE(i);
    CHECK(dist_equal(d[0], d[i]));
    CHECK(d[i].diverge.is_zero());
  }
}

std::vector<std::vector<BitString>> tuples_upto(int arity, int len) {
  std::vector<BitString> pool = all_strings_upto(len);
  std::vector<std::vector<BitString>> out{{}};
  for (int a = 0; a < arity; ++a) {
    std::vector<std::vector<BitString>> next;
    for (const auto& t : out)
      for (const auto& x : pool) {
        auto t2 = t;
        t2.push_back(x);
        next.push_back(std::move(t2));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace

TEST_CASE("table codec, frozen examples") {
  CHECK(encode_kv_list({}) == "");
  CHECK(encode_kv_list({{"", 1}}) == "011100");
  CHECK(encode_kv_list({{"", 0}}) == "011000");
  CHECK(encode_kv_list({{"1", 1}}) == "11011100");
  CHECK(encode_kv_list({{"01", 0}}) == "1011011000");
  CHECK(encode_kv_list({{"0", 1}, {"", 0}}) == "10011100011000");
  CHECK(decode_kv_list("011100") == std::vector<std::pair<BitString, int>>{{"", 1}});
  CHECK(decode_kv_list("").empty());
  CHECK_THROWS_AS(encode_kv_list({{"", 7}}), std::invalid_argument);
  CHECK_THROWS_AS(decode_kv_list("01"), std::invalid_argument);       // truncated entry
  CHECK_THROWS_AS(decode_kv_list("0111"), std::invalid_argument);     // missing terminator
  CHECK_THROWS_AS(decode_kv_list("011101"), std::invalid_argument);   // bad terminator
  CHECK_THROWS_AS(decode_kv_list("000000"), std::invalid_argument);   // value pair missing
  CHECK_THROWS_AS(decode_kv_list("1"), std::invalid_argument);        // dangling marker
}

TEST_CASE("table codec, round trips") {
  std::mt19937_64 rng(41);
  std::vector<BitString> keys = all_strings_upto(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::shuffle(keys.begin(), keys.end(), rng);
    size_t n = rng() % 7;
    std::vector<std::pair<BitString, int>> tab;
    for (size_t i = 0; i < n; ++i) tab.emplace_back(keys[i], int(rng() % 2));
    BitString enc = encode_kv_list(tab);
    CHECK(enc == slow_encode(tab));
    CHECK(decode_kv_list(enc) == tab);
  }
}

TEST_CASE("compiled base functions") {
  CHECK(sifp_show(*por_to_sifpra(*por_e())) == "R <- eps");
  CHECK(sifp_show(*por_to_sifpra(*por_query())) == "flip(X1)");
  CHECK(sifp_show(*por_to_sifpra(*por_succ(0))) == "R <- X1.0");
  CHECK(sifp_show(*por_to_sifpra(*por_succ(1))) == "R <- X1.1");
  CHECK(sifp_show(*por_to_sifpra(*por_proj(3, 2))) == "R <- X2");
}

TEST_CASE("compiled programs read but never write the argument registers") {
  auto lib = por_stdlib();
  for (const char* name : {"eq", "sub", "tail", "conc", "coinxor", "band", "trunc", "times"}) {
    SStmtPtr ra = por_to_sifpra(*lib.at(name));
    CAPTURE(name);
    CHECK(is_ra(*ra));
    CHECK(!assigns_input_register(*ra));
    CHECK(!stmt_mentions(*ra, "T"));
    SStmtPtr la = sifpra_to_sifpla(*ra);
    CHECK(is_la(*la));
    CHECK(!assigns_input_register(*la));
  }
}

TEST_CASE("flip compilation agrees with the function semantics") {
  auto lib = por_stdlib();
  std::map<std::string, PorPtr> fns;
  fns["cond"] = por_cond();
  fns["tail"] = lib.at("tail");
  fns["trunc"] = lib.at("trunc");
  fns["coinxor"] = lib.at("coinxor");
  fns["qq"] = por_comp(por_query(), {por_query()});
  for (const auto& [name, f] : fns) {
    SStmtPtr ra = por_to_sifpra(*f);
    for (const auto& in : tuples_upto(arity(*f), arity(*f) > 2 ? 1 : 2)) {
      CAPTURE(name);
      CHECK(dist_equal(eval_dist(*f, in), run_ra_dist(*ra, store_of(in))));
    }
  }
}

TEST_CASE("lookup-or-draw gadget, frozen behaviour") {
  // single fresh coordinate: one draw, table records it
  SStmtPtr one = sifpra_to_sifpla(*sifp_parse("flip(eps)"));
  CHECK(is_la(*one));
  Distribution d1 = run_la_dist(*one, Store{});
  CHECK(d1.weights.at("0") == Dyadic::pow2(1));
  CHECK(d1.weights.at("1") == Dyadic::pow2(1));
  auto [st1, used1] = run_la(*one, Store{}, BitStream{"1"});
  CHECK(used1 == 1);
  CHECK(st1.get("R") == "1");
  CHECK(st1.get("T") == encode_kv_list({{"", 1}}));

  // repeated coordinate: the second gadget replays the recorded bit
  SStmtPtr twice = sifpra_to_sifpla(*sifp_parse("flip(eps); flip(eps)"));
  for (int bit = 0; bit < 2; ++bit) {
    auto [st, used] = run_la(*twice, Store{}, BitStream{word(size_t(bit), 1)});
    CHECK(used == 1);  // exactly one bit on every path
    CHECK(st.get("R") == word(size_t(bit), 1));
    CHECK(st.get("T") == encode_kv_list({{"", bit}}));
  }
  Distribution d2 = run_la_dist(*twice, Store{});
  CHECK(d2.weights.at("0") == Dyadic::pow2(1));
  CHECK(d2.weights.at("1") == Dyadic::pow2(1));

  // distinct coordinates: two draws, R ends as the second
  SStmtPtr two = sifpra_to_sifpla(*sifp_parse("flip(eps); flip(eps.0)"));
  for (size_t mask = 0; mask < 4; ++mask) {
    auto [st, used] = run_la(*two, Store{}, BitStream{word(mask, 2)});
    CHECK(used == 2);
    CHECK(st.get("R") == word(mask, 2).substr(1, 1));
    CHECK(st.get("T") == encode_kv_list({{"", word(mask, 2)[0] - '0'},
                                         {"0", word(mask, 2)[1] - '0'}}));
  }

  // coordinate computed from an input register
  SStmtPtr coord = sifpra_to_sifpla(*sifp_parse("flip(X1.1)"));
  auto [st3, used3] = run_la(*coord, store_of({"0"}), BitStream{"1"});
  CHECK(used3 == 1);
  CHECK(st3.get("T") == encode_kv_list({{"01", 1}}));
}

TEST_CASE("lookup-or-draw gadget, rejections") {
  CHECK_THROWS_WITH_AS(sifpra_to_sifpla(*sifp_parse("T <- eps; flip(T)")),
                       doctest::Contains("reserved table register"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(sifpra_to_sifpla(*sifp_parse("R <- eps sub T")),
                       doctest::Contains("reserved table register"), std::invalid_argument);
  CHECK_THROWS_AS(sifpra_to_sifpla(*sifp_parse("randbit()")), std::invalid_argument);
}

TEST_CASE("flip-free programs pass through unchanged") {
  SStmtPtr p = sifp_parse("R <- X1; while (R) { R <- eps }");
  SStmtPtr q = sifpra_to_sifpla(*p);
  CHECK(sifp_show(*q) == sifp_show(*p));
}

TEST_CASE("machine compilation, frozen examples") {
  {
    OdMachine m = sifpla_to_odstm(*sifp_parse("R <- eps.1"));
    CHECK(m.tapes.front() == "R");
    CHECK(m.input_arity == 0);
    StmConfig c = od_init(m, {});
    CHECK(run(m.spec, c) == "1");
    CHECK(c.stream.consumed() == 0);
    Distribution d = run_dist(m.spec, od_init(m, {}));
    CHECK(d.weights.at("1") == Dyadic(1));
    CHECK(d.weights.size() == 1);
  }
  {
    OdMachine m = sifpla_to_odstm(*sifp_parse("randbit()"));
    Distribution d = run_dist(m.spec, od_init(m, {}));
    CHECK(d.weights.at("0") == Dyadic::pow2(1));
    CHECK(d.weights.at("1") == Dyadic::pow2(1));
    StmConfig c = od_init(m, {}, BitStream{"1"});
    CHECK(run(m.spec, c) == "1");
    CHECK(c.stream.consumed() == 1);  // the only consuming gadget
  }
  CHECK_THROWS_AS(sifpla_to_odstm(*sifp_parse("flip(eps)")), std::invalid_argument);
}

TEST_CASE("machines replay the program semantics deterministically") {
  // randomness-free programs: one tape per register, run equals the big step
  const char* progs[] = {
      "R <- X1; R <- R.0; S1 <- R; R <- S1 sub X1",
      "S1 <- eps; while (!(X1 sub S1)) { S2 <- S1.0 sub X1; S3 <- eps.1; "
      "while (S2) { S1 <- S1.0; R <- R.1; S2 <- eps; S3 <- eps }; "
      "while (S3) { S1 <- S1.1; S3 <- eps } }; R <- R sub X2",
      "R <- !(X1 sub X2) & Y1; Y1 <- R.0.1",
  };
  for (const char* src : progs) {
    SStmtPtr p = sifp_parse(src);
    OdMachine m = sifpla_to_odstm(*p);
    for (const auto& in : tuples_upto(2, 2)) {
      Store fin = run_ra(*p, store_of(in), Oracle());
      StmConfig c = od_init(m, in);
      CAPTURE(src);
      CHECK(run(m.spec, c) == fin.get("R"));
      CHECK(c.stream.consumed() == 0);
    }
  }
}

TEST_CASE("machine argument tapes exist only for registers the program reads") {
  OdMachine m = sifpla_to_odstm(*por_to_sifpra(*por_e()));
  CHECK(m.input_arity == 0);
  CHECK(std::find(m.tapes.begin(), m.tapes.end(), "X1") == m.tapes.end());
  Distribution d = run_dist(m.spec, od_init(m, {"101"}));  // ignored argument
  CHECK(d.weights.at("") == Dyadic(1));
}

TEST_CASE("pipeline bundles preserve distributions stage by stage") {
  auto lib = por_stdlib();
  std::map<std::string, PorPtr> corpus;
  corpus["E"] = por_e();
  corpus["P21"] = por_proj(2, 1);
  corpus["S1"] = por_succ(1);
  corpus["Q"] = por_query();
  corpus["tail"] = lib.at("tail");
  corpus["coinxor"] = lib.at("coinxor");
  corpus["qq"] = por_comp(por_query(), {por_query()});
  corpus["bandqq"] = por_comp(lib.at("band"), {por_query(), por_query()});
  for (const auto& [name, f] : corpus) {
    CAPTURE(name);
    PipelineBundle b = build_pipeline(f);
    CHECK(b.provenance.size() == 5);
    for (const auto& in : tuples_upto(arity(*f), 2)) check_bundle_on(b, in);
  }
}

TEST_CASE("pipeline bundle on the branching query combination") {
  // C(Q(x), eps, Q(x0), Q(x1)): queried coordinates overlap across branches
  PorPtr f = por_comp(por_cond(), {por_query(), por_e(),
                                   por_comp(por_query(), {por_succ(0)}),
                                   por_comp(por_query(), {por_succ(1)})});
  PipelineBundle b = build_pipeline(f);
  for (const auto& in : tuples_upto(1, 2)) check_bundle_on(b, in);
}

TEST_CASE("pipeline bundle on equality, sampled inputs") {
  PipelineBundle b = build_pipeline(por_stdlib().at("eq"));
  check_bundle_on(b, {"", ""});
  check_bundle_on(b, {"101", "101"});
  check_bundle_on(b, {"101", "100"});
  check_bundle_on(b, {"1", "101"});
}

TEST_CASE("stream bits are consumed once per fresh coordinate") {
  // coinxor queries x and x0: always two fresh coordinates
  PipelineBundle b = build_pipeline(por_stdlib().at("coinxor"));
  for (const auto& in : tuples_upto(1, 2)) {
    for (size_t mask = 0; mask < 8; ++mask) {
      auto [fin, used] = run_la(*b.stage_la, store_of(in), BitStream{word(mask, 3)});
      CHECK(used == 2);
    }
  }
  // Q(Q(x)) on x = 0: the outer coordinate collides with the inner one on half
  // the paths, so one or two bits are consumed
  PipelineBundle q = build_pipeline(por_comp(por_query(), {por_query()}));
  auto [f0, u0] = run_la(*q.stage_la, store_of({"0"}), BitStream{"000"});
  CHECK(u0 == 1);  // eta(0) = 0, then eta(0) replayed
  CHECK(f0.get("R") == "0");
  auto [f1, u1] = run_la(*q.stage_la, store_of({"0"}), BitStream{"100"});
  CHECK(u1 == 2);  // eta(0) = 1, then fresh eta(1) = 0
  CHECK(f1.get("R") == "0");
  Distribution d = eval_dist(*q.source, {"0"});
  CHECK(d.weights.at("0") == Dyadic::ratio(3, 2));
  CHECK(d.weights.at("1") == Dyadic::pow2(2));
}

TEST_CASE("manifests pin every stage") {
  PipelineBundle a = build_pipeline(por_query());
  PipelineBundle b = build_pipeline(por_query());
  PipelineBundle c = build_pipeline(por_e());
  std::string ma = pipeline_manifest(a);
  CHECK(ma == pipeline_manifest(b));
  CHECK(ma != pipeline_manifest(c));
  CHECK(std::count(ma.begin(), ma.end(), '\n') == 6);
  for (const char* stage : {"source ", "stage_ra ", "stage_la ", "stage_od ", "stage_stm ",
                            "stage_ptm "})
    CHECK(ma.find(stage) != std::string::npos);
}
