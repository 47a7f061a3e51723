#include "porlab/lambda.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

namespace porlab {

// ---- types ----

LTypePtr ty_s() {
  static const LTypePtr s = std::make_shared<LType>();
  return s;
}

LTypePtr ty_arrow(LTypePtr from, LTypePtr to) {
  auto t = std::make_shared<LType>();
  t->base = false;
  t->from = std::move(from);
  t->to = std::move(to);
  return LTypePtr(t);
}

bool ty_equal(const LTypePtr& a, const LTypePtr& b) {
  if (a->base != b->base) return false;
  if (a->base) return true;
  return ty_equal(a->from, b->from) && ty_equal(a->to, b->to);
}

std::string ty_show(const LTypePtr& t) {
  if (t->base) return "s";
  std::string lhs = ty_show(t->from);
  if (!t->from->base) lhs = "(" + lhs + ")";
  return lhs + " => " + ty_show(t->to);
}

namespace {

LTypePtr ty_fn(int n) {
  LTypePtr t = ty_s();
  for (int i = 0; i < n; ++i) t = ty_arrow(ty_s(), t);
  return t;
}

}  // namespace

LTypePtr const_type(LConst c) {
  switch (c) {
    case LConst::Zero:
    case LConst::One:
    case LConst::Eps: return ty_s();
    case LConst::Tail:
    case LConst::Flipcoin: return ty_fn(1);
    case LConst::Cat:
    case LConst::Trunc:
    case LConst::Times: return ty_fn(2);
    case LConst::Cond: return ty_fn(4);
    case LConst::Rec:
      return ty_arrow(
          ty_s(), ty_arrow(ty_fn(2), ty_arrow(ty_fn(2), ty_arrow(ty_fn(1), ty_fn(1)))));
  }
  throw std::logic_error("unknown constant");
}

const char* const_name(LConst c) {
  switch (c) {
    case LConst::Zero: return "0";
    case LConst::One: return "1";
    case LConst::Eps: return "eps";
    case LConst::Cat: return "o";
    case LConst::Tail: return "Tail";
    case LConst::Trunc: return "Trunc";
    case LConst::Cond: return "Cond";
    case LConst::Flipcoin: return "Flipcoin";
    case LConst::Times: return "Times";
    case LConst::Rec: return "Rec";
  }
  return "?";
}

// ---- terms ----

LTermPtr lt_var(std::string name) {
  auto t = std::make_shared<LTerm>();
  t->kind = LTerm::Kind::Var;
  t->var = std::move(name);
  return t;
}

LTermPtr lt_const(LConst c) {
  auto t = std::make_shared<LTerm>();
  t->kind = LTerm::Kind::Const;
  t->cst = c;
  return t;
}

LTermPtr lt_lam(std::string var, LTypePtr ann, LTermPtr body) {
  auto t = std::make_shared<LTerm>();
  t->kind = LTerm::Kind::Lam;
  t->var = std::move(var);
  t->ann = std::move(ann);
  t->body = std::move(body);
  return t;
}

LTermPtr lt_app(LTermPtr fn, LTermPtr arg) {
  auto t = std::make_shared<LTerm>();
  t->kind = LTerm::Kind::App;
  t->fn = std::move(fn);
  t->arg = std::move(arg);
  return t;
}

LTermPtr lt_apps(LTermPtr fn, const std::vector<LTermPtr>& args) {
  LTermPtr t = std::move(fn);
  for (const auto& a : args) t = lt_app(t, a);
  return t;
}

LTermPtr lt_numeral(const BitString& s) {
  LTermPtr t = lt_const(LConst::Eps);
  for (char c : s)
    t = lt_app(lt_app(lt_const(LConst::Cat), t), lt_const(c == '1' ? LConst::One : LConst::Zero));
  return t;
}

namespace {

bool is_cat_node(const LTermPtr& t) {
  return t->kind == LTerm::Kind::App && t->fn->kind == LTerm::Kind::App &&
         t->fn->fn->kind == LTerm::Kind::Const && t->fn->fn->cst == LConst::Cat;
}

bool is_bit_const(const LTermPtr& t, int* bit = nullptr) {
  if (t->kind != LTerm::Kind::Const) return false;
  if (t->cst != LConst::Zero && t->cst != LConst::One) return false;
  if (bit) *bit = t->cst == LConst::One;
  return true;
}

}  // namespace

bool is_numeral(const LTermPtr& t) {
  if (t->kind == LTerm::Kind::Const && t->cst == LConst::Eps) return true;
  return is_cat_node(t) && is_bit_const(t->arg) && is_numeral(t->fn->arg);
}

std::optional<BitString> value_of(const LTermPtr& t) {
  switch (t->kind) {
    case LTerm::Kind::Const:
      if (t->cst == LConst::Eps) return BitString();
      if (t->cst == LConst::Zero) return BitString("0");
      if (t->cst == LConst::One) return BitString("1");
      return std::nullopt;
    case LTerm::Kind::App: {
      if (!is_cat_node(t)) return std::nullopt;
      auto u = value_of(t->fn->arg);
      if (!u) return std::nullopt;
      auto v = value_of(t->arg);
      if (!v) return std::nullopt;
      return concat(*u, *v);
    }
    default: return std::nullopt;
  }
}

namespace {

void fv_rec(const LTermPtr& t, std::vector<std::string>& bound, std::set<std::string>& out) {
  switch (t->kind) {
    case LTerm::Kind::Var:
      if (std::find(bound.begin(), bound.end(), t->var) == bound.end()) out.insert(t->var);
      return;
    case LTerm::Kind::Const: return;
    case LTerm::Kind::Lam:
      bound.push_back(t->var);
      fv_rec(t->body, bound, out);
      bound.pop_back();
      return;
    case LTerm::Kind::App:
      fv_rec(t->fn, bound, out);
      fv_rec(t->arg, bound, out);
      return;
  }
}

std::set<std::string> fv_set(const LTermPtr& t) {
  std::vector<std::string> bound;
  std::set<std::string> out;
  fv_rec(t, bound, out);
  return out;
}

std::string clip(const std::string& s) {
  return s.size() <= 72 ? s : s.substr(0, 69) + "...";
}

// application spine: returns the head, fills args in application order
LTermPtr spine_of(const LTermPtr& t, std::vector<LTermPtr>& args) {
  args.clear();
  LTermPtr cur = t;
  while (cur->kind == LTerm::Kind::App) {
    args.push_back(cur->arg);
    cur = cur->fn;
  }
  std::reverse(args.begin(), args.end());
  return cur;
}

}  // namespace

std::vector<std::string> lam_free_vars(const LTermPtr& t) {
  auto s = fv_set(t);
  return std::vector<std::string>(s.begin(), s.end());
}

LTypePtr typecheck(const LTermPtr& t, const std::map<std::string, LTypePtr>& ctx) {
  switch (t->kind) {
    case LTerm::Kind::Var: {
      auto it = ctx.find(t->var);
      if (it == ctx.end()) throw std::runtime_error("unbound variable " + t->var);
      return it->second;
    }
    case LTerm::Kind::Const: return const_type(t->cst);
    case LTerm::Kind::Lam: {
      auto inner = ctx;
      inner[t->var] = t->ann;
      return ty_arrow(t->ann, typecheck(t->body, inner));
    }
    case LTerm::Kind::App: {
      LTypePtr ft = typecheck(t->fn, ctx);
      LTypePtr at = typecheck(t->arg, ctx);
      if (ft->base)
        throw std::runtime_error("type error at " + clip(lambda_show(t)) +
                                 ": head has type s and cannot be applied");
      if (!ty_equal(ft->from, at))
        throw std::runtime_error("type error at " + clip(lambda_show(t)) + ": argument has type " +
                                 ty_show(at) + ", expected " + ty_show(ft->from));
      return ft->to;
    }
  }
  throw std::logic_error("unknown term kind");
}

// ---- reduction ----

namespace {

LTermPtr subst(const LTermPtr& t, const std::string& x, const LTermPtr& v) {
  switch (t->kind) {
    case LTerm::Kind::Var: return t->var == x ? v : t;
    case LTerm::Kind::Const: return t;
    case LTerm::Kind::App: {
      LTermPtr f = subst(t->fn, x, v);
      LTermPtr a = subst(t->arg, x, v);
      return f == t->fn && a == t->arg ? t : lt_app(f, a);
    }
    case LTerm::Kind::Lam: {
      if (t->var == x) return t;
      auto body_fv = fv_set(t->body);
      if (!body_fv.count(x)) return t;
      std::string name = t->var;
      LTermPtr body = t->body;
      auto value_fv = fv_set(v);
      if (value_fv.count(name)) {
        std::string fresh = name;
        do fresh += "'";
        while (fresh == x || value_fv.count(fresh) || body_fv.count(fresh));
        body = subst(body, name, lt_var(fresh));
        name = fresh;
      }
      return lt_lam(name, t->ann, subst(body, x, v));
    }
  }
  throw std::logic_error("unknown term kind");
}

int delta_arity(LConst c) {
  switch (c) {
    case LConst::Tail:
    case LConst::Flipcoin: return 1;
    case LConst::Cat:
    case LConst::Trunc:
    case LConst::Times: return 2;
    case LConst::Cond: return 4;
    case LConst::Rec: return 5;
    default: return 0;
  }
}

std::optional<LTermPtr> delta(LConst c, const std::vector<LTermPtr>& a, const FlipTable& table) {
  switch (c) {
    case LConst::Cat: {
      // x o eps -> x ;  x o (y o b) -> (x o y) o b
      const LTermPtr& rhs = a[1];
      if (rhs->kind == LTerm::Kind::Const && rhs->cst == LConst::Eps) return a[0];
      if (is_cat_node(rhs) && is_bit_const(rhs->arg)) {
        LTermPtr joined = lt_app(lt_app(lt_const(LConst::Cat), a[0]), rhs->fn->arg);
        return lt_app(lt_app(lt_const(LConst::Cat), joined), rhs->arg);
      }
      return std::nullopt;
    }
    case LConst::Tail: {
      auto v = value_of(a[0]);
      if (!v) return std::nullopt;
      return lt_numeral(v->empty() ? BitString() : v->substr(0, v->size() - 1));
    }
    case LConst::Trunc: {
      auto u = value_of(a[0]);
      auto v = value_of(a[1]);
      if (!u || !v) return std::nullopt;
      return lt_numeral(truncate(*u, *v));
    }
    case LConst::Cond: {
      auto v = value_of(a[0]);
      if (!v) return std::nullopt;
      if (v->empty()) return a[1];
      return v->back() == '0' ? a[2] : a[3];
    }
    case LConst::Flipcoin: {
      auto v = value_of(a[0]);
      if (!v) return std::nullopt;
      auto it = table.find(*v);
      if (it == table.end()) throw OracleMiss(*v);
      return lt_numeral(BitString(1, it->second ? '1' : '0'));
    }
    case LConst::Times: {
      auto u = value_of(a[0]);
      auto v = value_of(a[1]);
      if (!u || !v) return std::nullopt;
      return lt_numeral(times(*u, *v));
    }
    case LConst::Rec: {
      auto v = value_of(a[4]);
      if (!v) return std::nullopt;
      if (v->empty()) return a[0];
      LTermPtr pred = lt_numeral(v->substr(0, v->size() - 1));
      const LTermPtr& hb = v->back() == '1' ? a[2] : a[1];
      LTermPtr inner = lt_apps(lt_const(LConst::Rec), {a[0], a[1], a[2], a[3], pred});
      return lt_apps(lt_const(LConst::Trunc),
                     {lt_apps(hb, {pred, inner}), lt_app(a[3], pred)});
    }
    default: return std::nullopt;
  }
}

// one leftmost-outermost beta or delta step, or nothing on a normal form
std::optional<LTermPtr> step(const LTermPtr& t, const FlipTable& table) {
  switch (t->kind) {
    case LTerm::Kind::Var:
    case LTerm::Kind::Const: return std::nullopt;
    case LTerm::Kind::Lam: {
      auto b = step(t->body, table);
      if (b) return lt_lam(t->var, t->ann, *b);
      return std::nullopt;
    }
    case LTerm::Kind::App: {
      if (t->fn->kind == LTerm::Kind::Lam) return subst(t->fn->body, t->fn->var, t->arg);
      std::vector<LTermPtr> args;
      LTermPtr head = spine_of(t, args);
      if (head->kind == LTerm::Kind::Const && delta_arity(head->cst) == (int)args.size()) {
        auto r = delta(head->cst, args, table);
        if (r) return r;
      }
      auto f = step(t->fn, table);
      if (f) return lt_app(*f, t->arg);
      auto a = step(t->arg, table);
      if (a) return lt_app(t->fn, *a);
      return std::nullopt;
    }
  }
  throw std::logic_error("unknown term kind");
}

LTermPtr eta_contract(const LTermPtr& t) {
  switch (t->kind) {
    case LTerm::Kind::Var:
    case LTerm::Kind::Const: return t;
    case LTerm::Kind::App: {
      LTermPtr f = eta_contract(t->fn);
      LTermPtr a = eta_contract(t->arg);
      return f == t->fn && a == t->arg ? t : lt_app(f, a);
    }
    case LTerm::Kind::Lam: {
      LTermPtr b = eta_contract(t->body);
      if (b->kind == LTerm::Kind::App && b->arg->kind == LTerm::Kind::Var &&
          b->arg->var == t->var && !fv_set(b->fn).count(t->var))
        return b->fn;
      return b == t->body ? t : lt_lam(t->var, t->ann, b);
    }
  }
  throw std::logic_error("unknown term kind");
}

}  // namespace

LTermPtr normalize(const LTermPtr& t, const FlipTable& table, long long fuel, bool check_types) {
  LTypePtr ty0;
  if (check_types) ty0 = typecheck(t);
  LTermPtr cur = t;
  while (auto next = step(cur, table)) {
    if (fuel-- <= 0) throw FuelExhausted();
    cur = *next;
    if (check_types) {
      LTypePtr ty = typecheck(cur);
      if (!ty_equal(ty, ty0))
        throw std::logic_error("reduction changed the type from " + ty_show(ty0) + " to " +
                               ty_show(ty) + " at " + clip(lambda_show(cur)));
    }
  }
  cur = eta_contract(cur);
  if (auto v = value_of(cur)) return lt_numeral(*v);
  return cur;
}

BitString denumeral(const LTermPtr& t) {
  auto v = value_of(t);
  if (!v) throw std::runtime_error("not a numeral: " + clip(lambda_show(t)));
  return *v;
}

// ---- derived combinators ----

const std::map<std::string, LTermPtr>& lambda_stdlib() {
  static const std::map<std::string, LTermPtr> lib = [] {
    auto kc = [](LConst c) { return lt_const(c); };
    auto lam = [](const char* v, LTermPtr body) { return lt_lam(v, ty_s(), std::move(body)); };
    auto cond = [&](LTermPtr s, LTermPtr te, LTermPtr t0, LTermPtr t1) {
      return lt_apps(kc(LConst::Cond), {s, te, t0, t1});
    };
    auto cat = [&](LTermPtr u, LTermPtr v) { return lt_apps(kc(LConst::Cat), {u, v}); };
    LTermPtr x = lt_var("x"), y = lt_var("y"), w = lt_var("w"), p = lt_var("p");
    LTermPtr a = lt_var("a"), b = lt_var("b");
    LTermPtr e = kc(LConst::Eps), c0 = kc(LConst::Zero), c1 = kc(LConst::One);

    // last digit of a word, eps on eps
    LTermPtr tB = lam("x", cond(x, e, c0, c1));
    LTermPtr tBNeg = lam("x", cond(x, e, c1, c0));
    LTermPtr tBOr =
        lam("x", lam("y", cond(lt_app(tB, x), lt_app(tB, y), lt_app(tB, y), c1)));
    LTermPtr tBAnd = lam("x", lam("y", cond(lt_app(tB, x), e, c0, lt_app(tB, y))));
    LTermPtr tEps = lam("x", cond(x, c1, c0, c0));
    LTermPtr tBool = lam("x", lt_apps(tBAnd, {lt_app(tEps, lt_app(kc(LConst::Tail), x)),
                                              lt_app(tBNeg, lt_app(tEps, x))}));
    LTermPtr tZero = lam("x", cond(lt_app(tBool, x), c0, c0, cond(x, c0, c1, c0)));

    LTermPtr tConc = lam(
        "x", lam("y", lt_apps(kc(LConst::Rec),
                              {x, lam("w", lam("p", cat(p, c0))),
                               lam("w", lam("p", cat(p, c1))),
                               lam("w", cat(cat(x, w), c1)), y})));

    LTermPtr tNonEps = lam("x", cond(x, c0, c1, c1));
    LTermPtr tIs0 = lam("x", cond(x, c0, c1, c0));
    LTermPtr tIs1 = lam("x", cond(x, c0, c0, c1));
    // x with its last |y| digits removed
    LTermPtr tRDrop = lam(
        "x", lam("y", lt_apps(kc(LConst::Rec),
                              {x, lam("w", lam("p", lt_app(kc(LConst::Tail), p))),
                               lam("w", lam("p", lt_app(kc(LConst::Tail), p))),
                               lam("w", cat(x, c1)), y})));
    // 1 iff b is an initial subword of a, recursing on b: at each prefix w
    // the next digit of a must exist and equal the digit b appends
    auto agree_step = [&](LTermPtr isb) {
      return lam(
          "w",
          lam("p", lt_apps(tBAnd,
                           {p, lt_apps(tBAnd,
                                       {lt_app(tNonEps, lt_apps(tRDrop, {a, w})),
                                        lt_app(isb, lt_apps(kc(LConst::Trunc),
                                                            {a, cat(w, c1)}))})})));
    };
    LTermPtr tAgree =
        lam("a", lam("b", lt_apps(kc(LConst::Rec), {c1, agree_step(tIs0), agree_step(tIs1),
                                                    lam("w", c0), b})));
    LTermPtr tSub = lam("x", lam("y", lt_apps(tAgree, {y, x})));
    LTermPtr tEq =
        lam("x", lam("y", lt_apps(tBAnd, {lt_apps(tSub, {x, y}), lt_apps(tSub, {y, x})})));

    std::map<std::string, LTermPtr> m;
    m["B"] = tB;
    m["BNeg"] = tBNeg;
    m["BOr"] = tBOr;
    m["BAnd"] = tBAnd;
    m["Eps"] = tEps;
    m["Bool"] = tBool;
    m["Zero"] = tZero;
    m["Conc"] = tConc;
    m["Sub"] = tSub;
    m["Eq"] = tEq;
    m["Times"] = kc(LConst::Times);
    return m;
  }();
  return lib;
}

// ---- translation from por ----

namespace {

LTermPtr bt_to_lambda(const BoundTerm& t, const std::vector<LTermPtr>& xs, const LTermPtr& w) {
  switch (t.kind) {
    case BoundTerm::Eps: return lt_const(LConst::Eps);
    case BoundTerm::Lit0: return lt_const(LConst::Zero);
    case BoundTerm::Lit1: return lt_const(LConst::One);
    case BoundTerm::Var: return t.var <= (int)xs.size() ? xs[t.var - 1] : w;
    case BoundTerm::Cat:
      return lt_apps(lt_const(LConst::Cat), {bt_to_lambda(*t.a, xs, w), bt_to_lambda(*t.b, xs, w)});
    case BoundTerm::Times:
      return lt_apps(lt_const(LConst::Times),
                     {bt_to_lambda(*t.a, xs, w), bt_to_lambda(*t.b, xs, w)});
  }
  throw std::logic_error("unknown bound term");
}

std::vector<LTermPtr> var_list(int n) {
  std::vector<LTermPtr> xs;
  for (int j = 1; j <= n; ++j) xs.push_back(lt_var("x" + std::to_string(j)));
  return xs;
}

LTermPtr close_over(int n, LTermPtr body) {
  for (int j = n; j >= 1; --j) body = lt_lam("x" + std::to_string(j), ty_s(), body);
  return body;
}

}  // namespace

LTermPtr por_to_lambda(const PorFn& f) {
  switch (f.kind) {
    case PorFn::E: return lt_lam("x1", ty_s(), lt_const(LConst::Eps));
    case PorFn::Proj: return close_over(f.n, lt_var("x" + std::to_string(f.i)));
    case PorFn::Succ:
      return lt_lam("x1", ty_s(),
                    lt_apps(lt_const(LConst::Cat),
                            {lt_var("x1"), lt_const(f.b ? LConst::One : LConst::Zero)}));
    case PorFn::Cond: return lt_const(LConst::Cond);
    case PorFn::Query: return lt_const(LConst::Flipcoin);
    case PorFn::Comp: {
      int n = arity(f);
      auto xs = var_list(n);
      std::vector<LTermPtr> inner;
      for (const auto& h : f.hs) inner.push_back(lt_apps(por_to_lambda(*h), xs));
      return close_over(n, lt_apps(por_to_lambda(*f.g), inner));
    }
    case PorFn::BRec: {
      int m = arity(*f.g);
      auto xs = var_list(m);
      LTermPtr w = lt_var("w"), p = lt_var("p"), y = lt_var("y");
      auto step_of = [&](const PorPtr& h) {
        std::vector<LTermPtr> as = xs;
        as.push_back(w);
        as.push_back(p);
        return lt_lam("w", ty_s(), lt_lam("p", ty_s(), lt_apps(por_to_lambda(*h), as)));
      };
      LTermPtr bound = lt_lam("w", ty_s(), bt_to_lambda(*f.t, xs, w));
      LTermPtr body =
          lt_apps(lt_const(LConst::Rec), {lt_apps(por_to_lambda(*f.g), xs), step_of(f.hs[0]),
                                          step_of(f.hs[1]), bound, y});
      return close_over(m, lt_lam("y", ty_s(), body));
    }
  }
  throw std::logic_error("unknown por constructor");
}

// ---- extraction back to por ----

namespace {

[[noreturn]] void reject(const std::string& what, const LTermPtr& t) {
  throw std::runtime_error("cannot extract a por function: " + what + " at " +
                           clip(lambda_show(t)));
}

const std::map<std::string, PorPtr>& l2p_lib() {
  static const std::map<std::string, PorPtr> lib = por_stdlib();
  return lib;
}

PorPtr l2p_const_eps(int n) {
  return n == 1 ? por_e() : por_comp(por_e(), {por_proj(n, 1)});
}

// comp(g, P_1..P_k) collapses to g
PorPtr collapse_identity(PorPtr c) {
  if (c->kind != PorFn::Comp) return c;
  int k = (int)c->hs.size();
  for (int j = 0; j < k; ++j) {
    const PorFn& h = *c->hs[j];
    if (h.kind != PorFn::Proj || h.n != k || h.i != j + 1) return c;
  }
  return c->g;
}

PorPtr l2p_compile(const LTermPtr& t, const std::map<std::string, PorPtr>& env, int n) {
  switch (t->kind) {
    case LTerm::Kind::Var: {
      auto it = env.find(t->var);
      if (it == env.end()) reject("variable out of scope", t);
      return it->second;
    }
    case LTerm::Kind::Const:
      switch (t->cst) {
        case LConst::Eps: return l2p_const_eps(n);
        case LConst::Zero: return por_comp(por_succ(0), {l2p_const_eps(n)});
        case LConst::One: return por_comp(por_succ(1), {l2p_const_eps(n)});
        default: reject("unapplied constant", t);
      }
    case LTerm::Kind::Lam: reject("higher-order subterm", t);
    case LTerm::Kind::App: {
      std::vector<LTermPtr> args;
      LTermPtr head = spine_of(t, args);
      auto comp_each = [&](const PorPtr& g) {
        std::vector<PorPtr> cs;
        for (const auto& arg : args) cs.push_back(l2p_compile(arg, env, n));
        return collapse_identity(por_comp(g, std::move(cs)));
      };
      if (head->kind == LTerm::Kind::Const) {
        auto want = [&](size_t k) {
          if (args.size() != k) reject("constant applied to the wrong number of arguments", t);
        };
        switch (head->cst) {
          case LConst::Cat: {
            want(2);
            if (auto v = value_of(args[1])) {
              PorPtr acc = l2p_compile(args[0], env, n);
              for (char c : *v)
                acc = collapse_identity(por_comp(por_succ(c == '1'), {acc}));
              return acc;
            }
            return comp_each(l2p_lib().at("conc"));
          }
          case LConst::Tail: want(1); return comp_each(l2p_lib().at("tail"));
          case LConst::Trunc: want(2); return comp_each(l2p_lib().at("trunc"));
          case LConst::Times: want(2); return comp_each(l2p_lib().at("times"));
          case LConst::Cond: want(4); return comp_each(por_cond());
          case LConst::Flipcoin: want(1); return comp_each(por_query());
          case LConst::Rec: reject("recursion outside the schema position", t);
          default: reject("string constant used as a function", t);
        }
      }
      if (head->kind == LTerm::Kind::Lam) {
        if (fv_set(head).empty()) {
          PorPtr g = lambda_to_por(head);
          if (arity(*g) != (int)args.size())
            reject("closed head applied to the wrong number of arguments", t);
          return comp_each(g);
        }
        LTermPtr next = subst(head->body, head->var, args[0]);
        std::vector<LTermPtr> rest(args.begin() + 1, args.end());
        return l2p_compile(lt_apps(next, rest), env, n);
      }
      reject("higher-order variable application", t);
    }
  }
  throw std::logic_error("unknown term kind");
}

BoundPtr parse_bound_term(const LTermPtr& t, const std::vector<std::string>& vars) {
  switch (t->kind) {
    case LTerm::Kind::Var: {
      for (int i = (int)vars.size() - 1; i >= 0; --i)
        if (vars[i] == t->var) return bt_var(i + 1);
      reject("variable out of scope in a bound term", t);
    }
    case LTerm::Kind::Const:
      if (t->cst == LConst::Eps) return bt_eps();
      if (t->cst == LConst::Zero) return bt_lit(0);
      if (t->cst == LConst::One) return bt_lit(1);
      reject("bound term outside the append/repeat grammar", t);
    case LTerm::Kind::App: {
      std::vector<LTermPtr> args;
      LTermPtr head = spine_of(t, args);
      if (head->kind == LTerm::Kind::Const && args.size() == 2) {
        if (head->cst == LConst::Cat)
          return bt_cat(parse_bound_term(args[0], vars), parse_bound_term(args[1], vars));
        if (head->cst == LConst::Times)
          return bt_times(parse_bound_term(args[0], vars), parse_bound_term(args[1], vars));
      }
      reject("bound term outside the append/repeat grammar", t);
    }
    default: reject("bound term outside the append/repeat grammar", t);
  }
}

}  // namespace

PorPtr lambda_to_por(const LTermPtr& t) {
  LTypePtr ty = typecheck(t);
  int n = 0;
  for (LTypePtr c = ty; !c->base; c = c->to) {
    if (!c->from->base)
      throw std::runtime_error("cannot extract a por function: higher-order type " + ty_show(ty));
    ++n;
  }
  if (n == 0)
    throw std::runtime_error("cannot extract a por function: the term denotes a single string");

  std::vector<std::string> vars;
  LTermPtr cur = t;
  while ((int)vars.size() < n && cur->kind == LTerm::Kind::Lam) {
    vars.push_back(cur->var);
    cur = cur->body;
  }
  if ((int)vars.size() < n) {
    std::set<std::string> used = fv_set(cur);
    used.insert(vars.begin(), vars.end());
    int k = 1;
    while ((int)vars.size() < n) {
      std::string fresh;
      do fresh = "x" + std::to_string(k++);
      while (used.count(fresh));
      used.insert(fresh);
      cur = lt_app(cur, lt_var(fresh));
      vars.push_back(fresh);
    }
  }

  std::vector<LTermPtr> args;
  LTermPtr head = spine_of(cur, args);
  if (head->kind == LTerm::Kind::Const && head->cst == LConst::Rec) {
    bool shape = args.size() == 5 && n >= 2 && args[4]->kind == LTerm::Kind::Var &&
                 args[4]->var == vars.back() && args[1]->kind == LTerm::Kind::Lam &&
                 args[1]->body->kind == LTerm::Kind::Lam && args[2]->kind == LTerm::Kind::Lam &&
                 args[2]->body->kind == LTerm::Kind::Lam && args[3]->kind == LTerm::Kind::Lam;
    for (int i = 0; shape && i < 4; ++i)
      if (fv_set(args[i]).count(vars.back())) shape = false;
    if (!shape) reject("recursion outside the schema shape", cur);
    int m = n - 1;
    std::map<std::string, PorPtr> env_g;
    for (int i = 0; i < m; ++i) env_g[vars[i]] = por_proj(m, i + 1);
    PorPtr g = l2p_compile(args[0], env_g, m);
    PorPtr hb[2];
    for (int bi = 0; bi < 2; ++bi) {
      const LTermPtr& lam = args[1 + bi];
      std::map<std::string, PorPtr> env_h;
      for (int i = 0; i < m; ++i) env_h[vars[i]] = por_proj(m + 2, i + 1);
      env_h[lam->var] = por_proj(m + 2, m + 1);
      env_h[lam->body->var] = por_proj(m + 2, m + 2);
      hb[bi] = l2p_compile(lam->body->body, env_h, m + 2);
    }
    std::vector<std::string> bvars(vars.begin(), vars.end() - 1);
    bvars.push_back(args[3]->var);
    BoundPtr bound = parse_bound_term(args[3]->body, bvars);
    return por_brec(g, hb[0], hb[1], bound);
  }

  std::map<std::string, PorPtr> env;
  for (int i = 0; i < n; ++i) env[vars[i]] = por_proj(n, i + 1);
  return l2p_compile(cur, env, n);
}

// ---- concrete syntax ----

namespace {

struct LTok {
  enum Kind { Ident, Bits, Sym, End } kind;
  std::string text;
  size_t pos;
};

std::vector<LTok> lam_lex(const std::string& src) {
  std::vector<LTok> out;
  size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace((unsigned char)c)) {
      ++i;
      continue;
    }
    if (c == '\\' || c == ':' || c == '.' || c == '(' || c == ')') {
      out.push_back({LTok::Sym, std::string(1, c), i});
      ++i;
      continue;
    }
    if (c == '=' && i + 1 < src.size() && src[i + 1] == '>') {
      out.push_back({LTok::Sym, "=>", i});
      i += 2;
      continue;
    }
    if (c == '0' || c == '1') {
      size_t j = i;
      while (j < src.size() && (src[j] == '0' || src[j] == '1')) ++j;
      out.push_back({LTok::Bits, src.substr(i, j - i), i});
      i = j;
      continue;
    }
    if (std::isalpha((unsigned char)c) || c == '_') {
      size_t j = i;
      while (j < src.size() && (std::isalnum((unsigned char)src[j]) || src[j] == '_' ||
                                src[j] == '\''))
        ++j;
      out.push_back({LTok::Ident, src.substr(i, j - i), i});
      i = j;
      continue;
    }
    throw std::runtime_error("syntax error at offset " + std::to_string(i) +
                             ": unexpected character '" + std::string(1, c) + "'");
  }
  out.push_back({LTok::End, "", src.size()});
  return out;
}

const std::map<std::string, LConst>& named_constants() {
  static const std::map<std::string, LConst> m = {
      {"eps", LConst::Eps},         {"o", LConst::Cat},     {"Tail", LConst::Tail},
      {"Trunc", LConst::Trunc},     {"Cond", LConst::Cond}, {"Flipcoin", LConst::Flipcoin},
      {"Times", LConst::Times},     {"Rec", LConst::Rec},
  };
  return m;
}

struct LamParser {
  std::vector<LTok> toks;
  size_t at = 0;

  const LTok& peek() const { return toks[at]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error("syntax error at offset " + std::to_string(peek().pos) + ": " + msg);
  }

  bool eat_sym(const std::string& s) {
    if (peek().kind == LTok::Sym && peek().text == s) {
      ++at;
      return true;
    }
    return false;
  }

  void expect_sym(const std::string& s) {
    if (!eat_sym(s)) fail("expected '" + s + "'");
  }

  LTypePtr parse_type() {
    LTypePtr lhs;
    if (eat_sym("(")) {
      lhs = parse_type();
      expect_sym(")");
    } else if (peek().kind == LTok::Ident && peek().text == "s") {
      ++at;
      lhs = ty_s();
    } else {
      fail("expected a type");
    }
    if (eat_sym("=>")) return ty_arrow(lhs, parse_type());
    return lhs;
  }

  LTermPtr parse_term() {
    if (eat_sym("\\")) {
      if (peek().kind != LTok::Ident) fail("expected a variable name");
      std::string v = peek().text;
      if (named_constants().count(v)) fail("reserved name " + v);
      ++at;
      expect_sym(":");
      LTypePtr ann = parse_type();
      expect_sym(".");
      return lt_lam(v, ann, parse_term());
    }
    LTermPtr t = parse_atom(true);
    while (LTermPtr a = parse_atom(false)) t = lt_app(t, a);
    return t;
  }

  LTermPtr parse_atom(bool required) {
    const LTok& tk = peek();
    if (tk.kind == LTok::Sym && tk.text == "(") {
      ++at;
      LTermPtr t = parse_term();
      expect_sym(")");
      return t;
    }
    if (tk.kind == LTok::Bits) {
      ++at;
      return lt_numeral(tk.text);
    }
    if (tk.kind == LTok::Ident) {
      ++at;
      auto it = named_constants().find(tk.text);
      if (it != named_constants().end()) return lt_const(it->second);
      return lt_var(tk.text);
    }
    if (required) fail("expected a term");
    return nullptr;
  }
};

std::string show_rec(const LTermPtr& t, bool arg_pos) {
  if (auto v = value_of(t)) return show_bits(*v);
  switch (t->kind) {
    case LTerm::Kind::Var: return t->var;
    case LTerm::Kind::Const: return const_name(t->cst);
    case LTerm::Kind::Lam: {
      std::string s = "\\" + t->var + ":" + ty_show(t->ann) + ". " + show_rec(t->body, false);
      return arg_pos ? "(" + s + ")" : s;
    }
    case LTerm::Kind::App: {
      std::string fn = show_rec(t->fn, t->fn->kind == LTerm::Kind::Lam);
      std::string arg = show_rec(
          t->arg, t->arg->kind == LTerm::Kind::App || t->arg->kind == LTerm::Kind::Lam);
      std::string s = fn + " " + arg;
      return arg_pos ? "(" + s + ")" : s;
    }
  }
  throw std::logic_error("unknown term kind");
}

}  // namespace

LTermPtr lambda_parse(const std::string& src) {
  LamParser p{lam_lex(src)};
  LTermPtr t = p.parse_term();
  if (p.peek().kind != LTok::End) p.fail("trailing input");
  return t;
}

std::string lambda_show(const LTermPtr& t) { return show_rec(t, false); }

}  // namespace porlab
