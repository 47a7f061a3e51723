#include "porlab/por.hpp"

#include <cassert>
#include <set>
#include <sstream>

namespace porlab {

BoundPtr bt_eps() { return std::make_shared<BoundTerm>(BoundTerm{BoundTerm::Eps}); }
BoundPtr bt_lit(int bit) {
  return std::make_shared<BoundTerm>(BoundTerm{bit ? BoundTerm::Lit1 : BoundTerm::Lit0});
}
BoundPtr bt_var(int i) {
  if (i < 1) throw std::invalid_argument("bound-term variable index must be >= 1");
  return std::make_shared<BoundTerm>(BoundTerm{BoundTerm::Var, i});
}
BoundPtr bt_cat(BoundPtr a, BoundPtr b) {
  return std::make_shared<BoundTerm>(BoundTerm{BoundTerm::Cat, 0, std::move(a), std::move(b)});
}
BoundPtr bt_times(BoundPtr a, BoundPtr b) {
  return std::make_shared<BoundTerm>(BoundTerm{BoundTerm::Times, 0, std::move(a), std::move(b)});
}

int bt_max_var(const BoundTerm& t) {
  switch (t.kind) {
    case BoundTerm::Var: return t.var;
    case BoundTerm::Cat:
    case BoundTerm::Times: return std::max(bt_max_var(*t.a), bt_max_var(*t.b));
    default: return 0;
  }
}

BitString bt_eval(const BoundTerm& t, const std::vector<BitString>& args) {
  switch (t.kind) {
    case BoundTerm::Eps: return {};
    case BoundTerm::Lit0: return "0";
    case BoundTerm::Lit1: return "1";
    case BoundTerm::Var:
      if (t.var > int(args.size())) throw std::invalid_argument("bound-term variable out of range");
      return args[size_t(t.var) - 1];
    case BoundTerm::Cat: return concat(bt_eval(*t.a, args), bt_eval(*t.b, args));
    case BoundTerm::Times: return times(bt_eval(*t.a, args), bt_eval(*t.b, args));
  }
  throw std::logic_error("unreachable");
}

BoundPtr bt_subst(const BoundTerm& t, const std::vector<BoundPtr>& map) {
  switch (t.kind) {
    case BoundTerm::Eps: return bt_eps();
    case BoundTerm::Lit0: return bt_lit(0);
    case BoundTerm::Lit1: return bt_lit(1);
    case BoundTerm::Var:
      if (t.var > int(map.size())) throw std::invalid_argument("substitution variable out of range");
      return map[size_t(t.var) - 1];
    case BoundTerm::Cat: return bt_cat(bt_subst(*t.a, map), bt_subst(*t.b, map));
    case BoundTerm::Times: return bt_times(bt_subst(*t.a, map), bt_subst(*t.b, map));
  }
  throw std::logic_error("unreachable");
}

std::string bt_show(const BoundTerm& t, int arity_without_y) {
  switch (t.kind) {
    case BoundTerm::Eps: return "(eps)";
    case BoundTerm::Lit0: return "(b0)";
    case BoundTerm::Lit1: return "(b1)";
    case BoundTerm::Var:
      if (t.var == arity_without_y + 1) return "(y)";
      return "(x " + std::to_string(t.var) + ")";
    case BoundTerm::Cat:
      return "(cat " + bt_show(*t.a, arity_without_y) + " " + bt_show(*t.b, arity_without_y) + ")";
    case BoundTerm::Times:
      return "(times " + bt_show(*t.a, arity_without_y) + " " + bt_show(*t.b, arity_without_y) +
             ")";
  }
  throw std::logic_error("unreachable");
}

int arity(const PorFn& f) {
  switch (f.kind) {
    case PorFn::E:
    case PorFn::Succ:
    case PorFn::Query: return 1;
    case PorFn::Proj: return f.n;
    case PorFn::Cond: return 4;
    case PorFn::Comp: return arity(*f.hs.front());
    case PorFn::BRec: return arity(*f.g) + 1;
  }
  throw std::logic_error("unreachable");
}

PorPtr por_e() { return std::make_shared<PorFn>(PorFn{PorFn::E}); }

PorPtr por_proj(int n, int i) {
  if (n < 1 || i < 1 || i > n) throw std::invalid_argument("projection needs 1 <= i <= n");
  PorFn f{PorFn::Proj};
  f.n = n;
  f.i = i;
  return std::make_shared<PorFn>(std::move(f));
}

PorPtr por_succ(int bit) {
  PorFn f{PorFn::Succ};
  f.b = bit ? 1 : 0;
  return std::make_shared<PorFn>(std::move(f));
}

PorPtr por_cond() { return std::make_shared<PorFn>(PorFn{PorFn::Cond}); }
PorPtr por_query() { return std::make_shared<PorFn>(PorFn{PorFn::Query}); }

PorPtr por_comp(PorPtr g, std::vector<PorPtr> hs) {
  if (hs.empty()) throw std::invalid_argument("composition needs at least one inner function");
  if (arity(*g) != int(hs.size()))
    throw std::invalid_argument("composition arity mismatch: arity(g) != #components");
  int n = arity(*hs.front());
  for (const auto& h : hs)
    if (arity(*h) != n) throw std::invalid_argument("composition components disagree on arity");
  PorFn f{PorFn::Comp};
  f.g = std::move(g);
  f.hs = std::move(hs);
  return std::make_shared<PorFn>(std::move(f));
}

PorPtr por_brec(PorPtr g, PorPtr h0, PorPtr h1, BoundPtr t) {
  int n = arity(*g);
  if (arity(*h0) != n + 2 || arity(*h1) != n + 2)
    throw std::invalid_argument("bounded recursion needs arity(h_b) = arity(g) + 2");
  if (bt_max_var(*t) > n + 1)
    throw std::invalid_argument("bound term mentions variables beyond (xs, y)");
  PorFn f{PorFn::BRec};
  f.g = std::move(g);
  f.hs = {std::move(h0), std::move(h1)};
  f.t = std::move(t);
  return std::make_shared<PorFn>(std::move(f));
}

static BitString eval_rec(const PorFn& f, const std::vector<BitString>& args,
                          const OracleIface& eta, long long& fuel) {
  if (--fuel < 0) throw FuelExhausted{};
  if (int(args.size()) != arity(f)) throw std::invalid_argument("arity mismatch in eval");
  switch (f.kind) {
    case PorFn::E: return {};
    case PorFn::Proj: return args[size_t(f.i) - 1];
    case PorFn::Succ: return args[0] + char('0' + f.b);
    case PorFn::Cond: {
      const BitString& x = args[0];
      if (x.empty()) return args[1];
      return x.back() == '0' ? args[2] : args[3];
    }
    case PorFn::Query: return BitString(1, char('0' + eta.query(args[0])));
    case PorFn::Comp: {
      std::vector<BitString> mid;
      mid.reserve(f.hs.size());
      for (const auto& h : f.hs) mid.push_back(eval_rec(*h, args, eta, fuel));
      return eval_rec(*f.g, mid, eta, fuel);
    }
    case PorFn::BRec: {
      std::vector<BitString> xs(args.begin(), args.end() - 1);
      const BitString& y = args.back();
      BitString cur = eval_rec(*f.g, xs, eta, fuel);
      std::vector<BitString> step(xs);
      step.push_back({});
      step.push_back({});
      std::vector<BitString> bargs(xs);
      bargs.push_back({});
      for (size_t i = 0; i < y.size(); ++i) {
        if (--fuel < 0) throw FuelExhausted{};
        BitString pred = y.substr(0, i);
        bargs.back() = pred;
        BitString bound = bt_eval(*f.t, bargs);
        step[xs.size()] = pred;
        step[xs.size() + 1] = cur;
        const PorFn& h = y[i] == '0' ? *f.hs[0] : *f.hs[1];
        cur = truncate(eval_rec(h, step, eta, fuel), bound);
        assert(cur.size() <= bound.size());
      }
      return cur;
    }
  }
  throw std::logic_error("unreachable");
}

BitString eval(const PorFn& f, const std::vector<BitString>& args, const OracleIface& eta,
               long long fuel) {
  return eval_rec(f, args, eta, fuel);
}

Distribution eval_dist(const PorFn& f, const std::vector<BitString>& args, long long fuel,
                       int coord_cap) {
  Distribution out;
  std::vector<std::map<BitString, int>> todo{{}};
  while (!todo.empty()) {
    std::map<BitString, int> tab = std::move(todo.back());
    todo.pop_back();
    try {
      BitString v = eval(f, args, PartialOracle(tab), fuel);
      out.add(v, Dyadic::pow2(tab.size()));
    } catch (const NeedCoord& nc) {
      if (int(tab.size()) >= coord_cap)
        throw std::runtime_error("eval_dist coordinate cap exceeded");
      auto t0 = tab;
      t0[nc.coord] = 0;
      tab[nc.coord] = 1;
      todo.push_back(std::move(t0));
      todo.push_back(std::move(tab));
    } catch (const FuelExhausted&) {
      out.add_diverge(Dyadic::pow2(tab.size()));
    }
  }
  return out;
}

std::vector<BitString> por_coords(const PorFn& f, const std::vector<BitString>& args,
                                  long long fuel, int coord_cap) {
  std::set<BitString> seen;
  std::vector<std::map<BitString, int>> todo{{}};
  while (!todo.empty()) {
    std::map<BitString, int> tab = std::move(todo.back());
    todo.pop_back();
    try {
      eval(f, args, PartialOracle(tab), fuel);
    } catch (const NeedCoord& nc) {
      if (int(tab.size()) >= coord_cap)
        throw std::runtime_error("por_coords coordinate cap exceeded");
      seen.insert(nc.coord);
      auto t0 = tab;
      t0[nc.coord] = 0;
      tab[nc.coord] = 1;
      todo.push_back(std::move(t0));
      todo.push_back(std::move(tab));
    } catch (const FuelExhausted&) {
    }
  }
  return {seen.begin(), seen.end()};
}

BoundPtr size_bound(const PorFn& f) {
  switch (f.kind) {
    case PorFn::E: return bt_eps();
    case PorFn::Proj: return bt_var(f.i);
    case PorFn::Succ: return bt_cat(bt_var(1), bt_lit(f.b));
    case PorFn::Cond: return bt_cat(bt_var(2), bt_cat(bt_var(3), bt_var(4)));
    case PorFn::Query: return bt_lit(1);
    case PorFn::Comp: {
      std::vector<BoundPtr> map;
      map.reserve(f.hs.size());
      for (const auto& h : f.hs) map.push_back(size_bound(*h));
      return bt_subst(*size_bound(*f.g), map);
    }
    case PorFn::BRec: return bt_cat(size_bound(*f.g), f.t);
  }
  throw std::logic_error("unreachable");
}

// ---- derived functions ----

static PorPtr lift1(const PorPtr& f, int n, int i) { return por_comp(f, {por_proj(n, i)}); }

static PorPtr const_eps(int n) {
  return n == 1 ? por_e() : por_comp(por_e(), {por_proj(n, 1)});
}
static PorPtr const_bit(int n, int bit) { return por_comp(por_succ(bit), {const_eps(n)}); }

// selector(x) := C(x, if_eps, if_0, if_1) over coerced selectors
static PorPtr cond_on(PorPtr scrut, PorPtr if_eps, PorPtr if_0, PorPtr if_1) {
  return por_comp(por_cond(),
                  {std::move(scrut), std::move(if_eps), std::move(if_0), std::move(if_1)});
}

std::map<std::string, PorPtr> por_stdlib() {
  std::map<std::string, PorPtr> lib;
  PorPtr p11 = por_proj(1, 1);

  // b(x) := C(x, eps, 0, 1) coerces a word to its last bit
  PorPtr coerce = cond_on(p11, const_eps(1), const_bit(1, 0), const_bit(1, 1));
  // bnot(x) := C(x, eps, 1, 0)
  PorPtr bnot = cond_on(p11, const_eps(1), const_bit(1, 1), const_bit(1, 0));
  // is0(x) := C(x, 0, 1, 0) ; is1(x) := C(x, 0, 0, 1) ; noneps(x) := C(x, 0, 1, 1)
  PorPtr is0 = cond_on(p11, const_bit(1, 0), const_bit(1, 1), const_bit(1, 0));
  PorPtr is1 = cond_on(p11, const_bit(1, 0), const_bit(1, 0), const_bit(1, 1));
  PorPtr noneps = cond_on(p11, const_bit(1, 0), const_bit(1, 1), const_bit(1, 1));

  PorPtr b1 = lift1(coerce, 2, 1), b2 = lift1(coerce, 2, 2);
  // band(x,y) := C(b(x), eps, 0, b(y)) ; bor(x,y) := C(b(x), b(y), b(y), 1)
  PorPtr band = cond_on(b1, const_eps(2), const_bit(2, 0), b2);
  PorPtr bor = cond_on(b1, b2, b2, const_bit(2, 1));
  // bxor(x,y) := C(b(x), b(y), b(y), bnot(y))
  PorPtr bxor = cond_on(b1, b2, b2, lift1(bnot, 2, 2));

  // tail(yb) := y, tail(eps) := eps, by recursion on the argument itself
  PorPtr tail2 = por_brec(por_e(), por_proj(3, 2), por_proj(3, 2), bt_var(2));
  PorPtr tail = por_comp(tail2, {p11, p11});

  // trunc(x,y) := x|_y : each step re-cuts x at length |y'|+1 of the prefix seen
  PorPtr trunc =
      por_brec(por_e(), por_proj(3, 1), por_proj(3, 1), bt_cat(bt_var(2), bt_lit(1)));

  // rdrop(x,y) := x with its last |y| bits removed
  PorPtr tail_prev = por_comp(tail, {por_proj(3, 3)});
  PorPtr rdrop = por_brec(p11, tail_prev, tail_prev, bt_var(1));

  // islonger(x,y) := 1 iff |x| > |y|
  PorPtr islonger = por_comp(noneps, {rdrop});

  // agree(x,y) := 1 iff y is an initial subword of x, by recursion on y:
  //   agree(x,eps) := 1
  //   agree(x,yb) := agree(x,y) AND |x| > |y| AND bit_{|y|+1}(x) = b
  PorPtr probe = por_comp(trunc, {por_proj(3, 1), por_comp(por_succ(1), {por_proj(3, 2)})});
  auto agree_step = [&](const PorPtr& isb) {
    PorPtr len_ok = por_comp(islonger, {por_proj(3, 1), por_proj(3, 2)});
    PorPtr bit_ok = por_comp(isb, {probe});
    return por_comp(band, {por_proj(3, 3), por_comp(band, {len_ok, bit_ok})});
  };
  PorPtr agree = por_brec(const_bit(1, 1), agree_step(is0), agree_step(is1), bt_lit(1));

  // sub(x,y) := 1 iff x is an initial subword of y
  PorPtr sub = por_comp(agree, {por_proj(2, 2), por_proj(2, 1)});
  // eq(x,y) := sub(x,y) AND sub(y,x)
  PorPtr eq = por_comp(band, {sub, por_comp(sub, {por_proj(2, 2), por_proj(2, 1)})});

  // conc(x,eps) := x ; conc(x,yb) := conc(x,y).b
  PorPtr conc = por_brec(p11, por_comp(por_succ(0), {por_proj(3, 3)}),
                         por_comp(por_succ(1), {por_proj(3, 3)}),
                         bt_cat(bt_var(1), bt_cat(bt_var(2), bt_lit(1))));

  // times(x,eps) := eps ; times(x,yb) := conc(times(x,y),x)
  PorPtr times =
      por_brec(const_eps(1), por_comp(conc, {por_proj(3, 3), por_proj(3, 1)}),
               por_comp(conc, {por_proj(3, 3), por_proj(3, 1)}),
               bt_times(bt_cat(bt_var(1), bt_lit(1)), bt_cat(bt_var(2), bt_lit(1))));

  // coinxor(x) := Q(x) XOR Q(x.0)
  PorPtr coinxor = por_comp(
      bxor, {por_comp(por_query(), {p11}), por_comp(por_query(), {por_succ(0)})});

  lib["b"] = coerce;
  lib["bnot"] = bnot;
  lib["is0"] = is0;
  lib["is1"] = is1;
  lib["noneps"] = noneps;
  lib["band"] = band;
  lib["bor"] = bor;
  lib["bxor"] = bxor;
  lib["tail"] = tail;
  lib["trunc"] = trunc;
  lib["rdrop"] = rdrop;
  lib["islonger"] = islonger;
  lib["sub"] = sub;
  lib["eq"] = eq;
  lib["conc"] = conc;
  lib["times"] = times;
  lib["coinxor"] = coinxor;
  return lib;
}

// ---- concrete syntax ----

namespace {

struct Tokens {
  std::vector<std::string> toks;
  size_t pos = 0;

  explicit Tokens(const std::string& src) {
    std::string cur;
    for (char c : src) {
      if (c == '(' || c == ')') {
        if (!cur.empty()) toks.push_back(cur), cur.clear();
        toks.push_back(std::string(1, c));
      } else if (isspace(static_cast<unsigned char>(c))) {
        if (!cur.empty()) toks.push_back(cur), cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) toks.push_back(cur);
  }
  const std::string& peek() const {
    static const std::string end = "<end>";
    return pos < toks.size() ? toks[pos] : end;
  }
  std::string next() {
    if (pos >= toks.size()) throw std::invalid_argument("unexpected end of input");
    return toks[pos++];
  }
  void expect(const std::string& t) {
    std::string got = next();
    if (got != t) throw std::invalid_argument("expected '" + t + "', got '" + got + "'");
  }
};

int parse_int(const std::string& t) {
  size_t used = 0;
  int v = std::stoi(t, &used);
  if (used != t.size()) throw std::invalid_argument("bad integer: " + t);
  return v;
}

BoundPtr parse_bound(Tokens& tk, int n) {
  tk.expect("(");
  std::string head = tk.next();
  BoundPtr out;
  if (head == "eps") {
    out = bt_eps();
  } else if (head == "b0") {
    out = bt_lit(0);
  } else if (head == "b1") {
    out = bt_lit(1);
  } else if (head == "x") {
    out = bt_var(parse_int(tk.next()));
  } else if (head == "y") {
    out = bt_var(n + 1);
  } else if (head == "cat" || head == "times") {
    BoundPtr a = parse_bound(tk, n);
    BoundPtr b = parse_bound(tk, n);
    out = head == "cat" ? bt_cat(a, b) : bt_times(a, b);
  } else {
    throw std::invalid_argument("bad bound term head: " + head);
  }
  tk.expect(")");
  return out;
}

PorPtr parse_fn(Tokens& tk) {
  tk.expect("(");
  std::string head = tk.next();
  PorPtr out;
  if (head == "E") {
    out = por_e();
  } else if (head == "P") {
    int n = parse_int(tk.next());
    int i = parse_int(tk.next());
    out = por_proj(n, i);
  } else if (head == "S0") {
    out = por_succ(0);
  } else if (head == "S1") {
    out = por_succ(1);
  } else if (head == "C") {
    out = por_cond();
  } else if (head == "Q") {
    out = por_query();
  } else if (head == "comp") {
    PorPtr g = parse_fn(tk);
    std::vector<PorPtr> hs;
    while (tk.peek() == "(") hs.push_back(parse_fn(tk));
    out = por_comp(std::move(g), std::move(hs));
  } else if (head == "brec") {
    PorPtr g = parse_fn(tk);
    PorPtr h0 = parse_fn(tk);
    PorPtr h1 = parse_fn(tk);
    BoundPtr t = parse_bound(tk, arity(*g));
    out = por_brec(std::move(g), std::move(h0), std::move(h1), std::move(t));
  } else {
    throw std::invalid_argument("bad function head: " + head);
  }
  tk.expect(")");
  return out;
}

}  // namespace

PorPtr por_parse(const std::string& src) {
  Tokens tk(src);
  PorPtr f = parse_fn(tk);
  if (tk.pos != tk.toks.size()) throw std::invalid_argument("trailing input after function");
  return f;
}

std::string por_show(const PorFn& f) {
  switch (f.kind) {
    case PorFn::E: return "(E)";
    case PorFn::Proj: return "(P " + std::to_string(f.n) + " " + std::to_string(f.i) + ")";
    case PorFn::Succ: return f.b ? "(S1)" : "(S0)";
    case PorFn::Cond: return "(C)";
    case PorFn::Query: return "(Q)";
    case PorFn::Comp: {
      std::string out = "(comp " + por_show(*f.g);
      for (const auto& h : f.hs) out += " " + por_show(*h);
      return out + ")";
    }
    case PorFn::BRec:
      return "(brec " + por_show(*f.g) + " " + por_show(*f.hs[0]) + " " + por_show(*f.hs[1]) +
             " " + bt_show(*f.t, arity(*f.g)) + ")";
  }
  throw std::logic_error("unreachable");
}

}  // namespace porlab
