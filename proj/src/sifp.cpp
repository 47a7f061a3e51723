#include "porlab/sifp.hpp"

#include <cctype>
#include <stdexcept>

namespace porlab {

bool valid_register(const std::string& id) {
  if (id == "R" || id == "Q" || id == "Z" || id == "T") return true;
  if (id.size() < 2) return false;
  if (id[0] != 'X' && id[0] != 'Y' && id[0] != 'S') return false;
  for (size_t i = 1; i < id.size(); ++i)
    if (!std::isdigit((unsigned char)id[i])) return false;
  return true;
}

namespace {

std::string check_register(std::string id) {
  if (!valid_register(id)) throw std::invalid_argument("bad register name " + id);
  return id;
}

}  // namespace

SExprPtr se_eps() {
  auto e = std::make_shared<SifpExpr>();
  e->kind = SifpExpr::Eps;
  return e;
}

SExprPtr se_app(SExprPtr inner, int bit) {
  auto e = std::make_shared<SifpExpr>();
  e->kind = SifpExpr::App;
  e->e = std::move(inner);
  e->bit = bit ? 1 : 0;
  return e;
}

SExprPtr se_reg(std::string id) {
  auto e = std::make_shared<SifpExpr>();
  e->kind = SifpExpr::Reg;
  e->reg = check_register(std::move(id));
  return e;
}

SExprPtr se_sub(SExprPtr inner, std::string id) {
  auto e = std::make_shared<SifpExpr>();
  e->kind = SifpExpr::Sub;
  e->e = std::move(inner);
  e->reg = check_register(std::move(id));
  return e;
}

SExprPtr se_and(SExprPtr inner, std::string id) {
  auto e = std::make_shared<SifpExpr>();
  e->kind = SifpExpr::And;
  e->e = std::move(inner);
  e->reg = check_register(std::move(id));
  return e;
}

SExprPtr se_not(SExprPtr inner) {
  auto e = std::make_shared<SifpExpr>();
  e->kind = SifpExpr::Not;
  e->e = std::move(inner);
  return e;
}

SStmtPtr st_assign(std::string id, SExprPtr e) {
  auto s = std::make_shared<SifpStmt>();
  s->kind = SifpStmt::Assign;
  s->reg = check_register(std::move(id));
  s->e = std::move(e);
  return s;
}

SStmtPtr st_seq(SStmtPtr a, SStmtPtr b) {
  auto s = std::make_shared<SifpStmt>();
  s->kind = SifpStmt::Seq;
  s->has_flip = a->has_flip || b->has_flip;
  s->has_randbit = a->has_randbit || b->has_randbit;
  if (s->has_flip && s->has_randbit)
    throw std::invalid_argument("a program cannot mix flip and randbit");
  s->a = std::move(a);
  s->b = std::move(b);
  return s;
}

SStmtPtr st_while(SExprPtr e, SStmtPtr body) {
  auto s = std::make_shared<SifpStmt>();
  s->kind = SifpStmt::While;
  s->e = std::move(e);
  s->has_flip = body->has_flip;
  s->has_randbit = body->has_randbit;
  s->a = std::move(body);
  return s;
}

SStmtPtr st_flip(SExprPtr e) {
  auto s = std::make_shared<SifpStmt>();
  s->kind = SifpStmt::Flip;
  s->e = std::move(e);
  s->has_flip = true;
  return s;
}

SStmtPtr st_randbit() {
  auto s = std::make_shared<SifpStmt>();
  s->kind = SifpStmt::RandBit;
  s->has_randbit = true;
  return s;
}

BitString Store::get(const std::string& id) const {
  auto it = regs.find(id);
  return it == regs.end() ? BitString() : it->second;
}

void Store::set(const std::string& id, BitString v) { regs[id] = std::move(v); }

BitString eval_expr(const SifpExpr& e, const Store& s) {
  switch (e.kind) {
    case SifpExpr::Eps: return BitString();
    case SifpExpr::App: return concat(eval_expr(*e.e, s), BitString(1, e.bit ? '1' : '0'));
    case SifpExpr::Reg: return s.get(e.reg);
    case SifpExpr::Sub:
      return is_initial_subword(eval_expr(*e.e, s), s.get(e.reg)) ? "1" : "0";
    case SifpExpr::And:
      return eval_expr(*e.e, s) == "1" && s.get(e.reg) == "1" ? "1" : "0";
    case SifpExpr::Not: return eval_expr(*e.e, s) == "0" ? "1" : "0";
  }
  throw std::logic_error("unknown expression kind");
}

namespace {

// shared control flow; the random primitive is what the dialects swap out
template <typename OnFlip, typename OnRandBit>
void run_stmt(const SifpStmt& p, Store& s, long long& fuel, const OnFlip& on_flip,
              const OnRandBit& on_randbit) {
  if (--fuel < 0) throw FuelExhausted();
  switch (p.kind) {
    case SifpStmt::Assign: s.set(p.reg, eval_expr(*p.e, s)); return;
    case SifpStmt::Seq:
      run_stmt(*p.a, s, fuel, on_flip, on_randbit);
      run_stmt(*p.b, s, fuel, on_flip, on_randbit);
      return;
    case SifpStmt::While:
      while (eval_expr(*p.e, s) == "1") {
        run_stmt(*p.a, s, fuel, on_flip, on_randbit);
        if (--fuel < 0) throw FuelExhausted();
      }
      return;
    case SifpStmt::Flip: s.set(kOutputReg, on_flip(eval_expr(*p.e, s)) ? "1" : "0"); return;
    case SifpStmt::RandBit: s.set(kOutputReg, on_randbit() ? "1" : "0"); return;
  }
}

}  // namespace

Store run_ra(const SifpStmt& p, Store s, const OracleIface& eta, long long fuel) {
  if (!is_ra(p)) throw std::invalid_argument("randbit statement in a flip program");
  run_stmt(
      p, s, fuel, [&](const BitString& coord) { return eta.query(coord); },
      []() -> int { throw std::logic_error("unreachable"); });
  return s;
}

std::pair<Store, size_t> run_la(const SifpStmt& p, Store s, BitStream omega, long long fuel) {
  if (!is_la(p)) throw std::invalid_argument("flip statement in a randbit program");
  run_stmt(
      p, s, fuel, [](const BitString&) -> int { throw std::logic_error("unreachable"); },
      [&]() { return omega.take(); });
  return {std::move(s), omega.consumed()};
}

Distribution run_ra_dist(const SifpStmt& p, const Store& s, long long fuel, int coord_cap) {
  if (!is_ra(p)) throw std::invalid_argument("randbit statement in a flip program");
  Distribution out;
  std::vector<std::map<BitString, int>> todo{{}};
  while (!todo.empty()) {
    std::map<BitString, int> tab = std::move(todo.back());
    todo.pop_back();
    try {
      Store fin = run_ra(p, s, PartialOracle(tab), fuel);
      out.add(fin.get(kOutputReg), Dyadic::pow2(tab.size()));
    } catch (const NeedCoord& nc) {
      if (int(tab.size()) >= coord_cap)
        throw std::runtime_error("run_ra_dist coordinate cap exceeded");
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

Distribution run_la_dist(const SifpStmt& p, const Store& s, long long fuel, int bit_cap) {
  if (!is_la(p)) throw std::invalid_argument("flip statement in a randbit program");
  Distribution out;
  std::vector<BitString> todo{""};
  while (!todo.empty()) {
    BitString prefix = std::move(todo.back());
    todo.pop_back();
    BitStream omega{prefix, 0, true};
    try {
      auto [fin, consumed] = run_la(p, s, omega, fuel);
      out.add(fin.get(kOutputReg), Dyadic::pow2(consumed));
    } catch (const NeedStreamBit&) {
      if (int(prefix.size()) >= bit_cap)
        throw std::runtime_error("run_la_dist stream cap exceeded");
      todo.push_back(prefix + "0");
      todo.push_back(prefix + "1");
    } catch (const FuelExhausted&) {
      out.add_diverge(Dyadic::pow2(prefix.size()));
    }
  }
  return out;
}

// ---- concrete syntax ----

namespace {

struct STok {
  enum Kind { Ident, Sym, End } kind;
  std::string text;
  size_t pos;
};

std::vector<STok> sifp_lex(const std::string& src) {
  std::vector<STok> out;
  size_t i = 0;
  auto sym = [&](std::string s) {
    size_t at = i;
    i += s.size();
    out.push_back({STok::Sym, std::move(s), at});
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace((unsigned char)c)) {
      ++i;
      continue;
    }
    if (c == '<' && i + 1 < src.size() && src[i + 1] == '-') {
      sym("<-");
      continue;
    }
    if (c == '.' && i + 1 < src.size() && (src[i + 1] == '0' || src[i + 1] == '1')) {
      sym(std::string(".") + src[i + 1]);
      continue;
    }
    if (c == ';' || c == '&' || c == '!' || c == '(' || c == ')' || c == '{' || c == '}') {
      sym(std::string(1, c));
      continue;
    }
    if (std::isalnum((unsigned char)c)) {
      size_t j = i;
      while (j < src.size() && std::isalnum((unsigned char)src[j])) ++j;
      out.push_back({STok::Ident, src.substr(i, j - i), i});
      i = j;
      continue;
    }
    throw std::runtime_error("syntax error at offset " + std::to_string(i) +
                             ": unexpected character '" + std::string(1, c) + "'");
  }
  out.push_back({STok::End, "", src.size()});
  return out;
}

struct SifpParser {
  std::vector<STok> toks;
  size_t at = 0;

  const STok& peek() const { return toks[at]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error("syntax error at offset " + std::to_string(peek().pos) + ": " + msg);
  }

  bool eat_sym(const std::string& s) {
    if (peek().kind == STok::Sym && peek().text == s) {
      ++at;
      return true;
    }
    return false;
  }

  void expect_sym(const std::string& s) {
    if (!eat_sym(s)) fail("expected '" + s + "'");
  }

  bool eat_ident(const std::string& s) {
    if (peek().kind == STok::Ident && peek().text == s) {
      ++at;
      return true;
    }
    return false;
  }

  std::string expect_register() {
    if (peek().kind != STok::Ident || !valid_register(peek().text))
      fail("expected a register");
    return toks[at++].text;
  }

  SExprPtr parse_expr() {
    SExprPtr e = parse_unary();
    for (;;) {
      if (eat_ident("sub"))
        e = se_sub(std::move(e), expect_register());
      else if (eat_sym("&"))
        e = se_and(std::move(e), expect_register());
      else
        return e;
    }
  }

  SExprPtr parse_unary() {
    if (eat_sym("!")) return se_not(parse_unary());
    return parse_postfix();
  }

  SExprPtr parse_postfix() {
    SExprPtr e = parse_atom();
    for (;;) {
      if (eat_sym(".0"))
        e = se_app(std::move(e), 0);
      else if (eat_sym(".1"))
        e = se_app(std::move(e), 1);
      else
        return e;
    }
  }

  SExprPtr parse_atom() {
    if (eat_sym("(")) {
      SExprPtr e = parse_expr();
      expect_sym(")");
      return e;
    }
    if (eat_ident("eps")) return se_eps();
    if (peek().kind == STok::Ident && valid_register(peek().text)) return se_reg(toks[at++].text);
    fail("expected an expression");
  }

  SStmtPtr parse_stmt() {
    if (eat_ident("while")) {
      expect_sym("(");
      SExprPtr guard = parse_expr();
      expect_sym(")");
      expect_sym("{");
      SStmtPtr body = parse_program();
      expect_sym("}");
      return st_while(std::move(guard), std::move(body));
    }
    if (eat_ident("flip")) {
      expect_sym("(");
      SExprPtr e = parse_expr();
      expect_sym(")");
      return st_flip(std::move(e));
    }
    if (eat_ident("randbit")) {
      expect_sym("(");
      expect_sym(")");
      return st_randbit();
    }
    std::string reg = expect_register();
    expect_sym("<-");
    return st_assign(std::move(reg), parse_expr());
  }

  bool stmt_ahead() const {
    return peek().kind == STok::Ident;
  }

  SStmtPtr parse_program() {
    SStmtPtr p = parse_stmt();
    while (eat_sym(";")) {
      if (!stmt_ahead()) break;  // trailing separator
      p = st_seq(std::move(p), parse_stmt());
    }
    return p;
  }
};

void show_expr_rec(const SifpExpr& e, std::string& out) {
  switch (e.kind) {
    case SifpExpr::Eps: out += "eps"; return;
    case SifpExpr::Reg: out += e.reg; return;
    case SifpExpr::App: {
      bool wrap = e.e->kind == SifpExpr::Sub || e.e->kind == SifpExpr::And ||
                  e.e->kind == SifpExpr::Not;
      if (wrap) out += "(";
      show_expr_rec(*e.e, out);
      if (wrap) out += ")";
      out += e.bit ? ".1" : ".0";
      return;
    }
    case SifpExpr::Not: {
      bool tight = e.e->kind == SifpExpr::Sub || e.e->kind == SifpExpr::And;
      out += "!";
      if (tight) out += "(";
      show_expr_rec(*e.e, out);
      if (tight) out += ")";
      return;
    }
    case SifpExpr::Sub:
    case SifpExpr::And:
      show_expr_rec(*e.e, out);
      out += e.kind == SifpExpr::Sub ? " sub " : " & ";
      out += e.reg;
      return;
  }
}

void show_stmt_rec(const SifpStmt& p, std::string& out) {
  switch (p.kind) {
    case SifpStmt::Assign:
      out += p.reg + " <- " + sifp_show_expr(*p.e);
      return;
    case SifpStmt::Seq:
      show_stmt_rec(*p.a, out);
      out += "; ";
      show_stmt_rec(*p.b, out);
      return;
    case SifpStmt::While:
      out += "while (" + sifp_show_expr(*p.e) + ") { ";
      show_stmt_rec(*p.a, out);
      out += " }";
      return;
    case SifpStmt::Flip:
      out += "flip(" + sifp_show_expr(*p.e) + ")";
      return;
    case SifpStmt::RandBit: out += "randbit()"; return;
  }
}

}  // namespace

SStmtPtr sifp_parse(const std::string& src) {
  SifpParser p{sifp_lex(src)};
  SStmtPtr s = p.parse_program();
  if (p.peek().kind != STok::End) p.fail("trailing input");
  return s;
}

SExprPtr sifp_parse_expr(const std::string& src) {
  SifpParser p{sifp_lex(src)};
  SExprPtr e = p.parse_expr();
  if (p.peek().kind != STok::End) p.fail("trailing input");
  return e;
}

std::string sifp_show(const SifpStmt& p) {
  std::string out;
  show_stmt_rec(p, out);
  return out;
}

std::string sifp_show_expr(const SifpExpr& e) {
  std::string out;
  show_expr_rec(e, out);
  return out;
}

}  // namespace porlab
