#include "porlab/translate.hpp"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace porlab {

namespace {

std::string sreg(int i) { return "S" + std::to_string(i); }

SExprPtr r_(const std::string& id) { return se_reg(id); }

SExprPtr bits_expr(const std::string& bits) {
  SExprPtr e = se_eps();
  for (char c : bits) e = se_app(std::move(e), c - '0');
  return e;
}

SStmtPtr seq_range(const std::vector<SStmtPtr>& v, size_t lo, size_t hi) {
  if (hi - lo == 1) return v[lo];
  size_t mid = lo + (hi - lo) / 2;
  return st_seq(seq_range(v, lo, mid), seq_range(v, mid, hi));
}

SStmtPtr seq_all(const std::vector<SStmtPtr>& v) {
  if (v.empty()) throw std::logic_error("empty statement block");
  return seq_range(v, 0, v.size());
}

bool has_cond(const PorFn& f) {
  if (f.kind == PorFn::Cond) return true;
  if (f.g && has_cond(*f.g)) return true;
  for (const PorPtr& h : f.hs)
    if (has_cond(*h)) return true;
  return false;
}

// Statement emitter with structured while helpers. Scratch discipline: a node
// writing its result into S_k draws scratch from S_sp with sp > k, so sibling
// subtrees reuse the same slots and only ancestors' frames stay live.
struct RaEmit {
  std::vector<SStmtPtr> out;

  void stmt(SStmtPtr s) { out.push_back(std::move(s)); }

  void assign(const std::string& r, SExprPtr e) { stmt(st_assign(r, std::move(e))); }

  void set_bits(const std::string& r, const std::string& bits) { assign(r, bits_expr(bits)); }

  void copy(const std::string& dst, const std::string& src) {
    if (dst != src) assign(dst, r_(src));
  }

  template <typename F>
  void loop(SExprPtr guard, F&& body) {
    std::vector<SStmtPtr> saved;
    saved.swap(out);
    body();
    std::vector<SStmtPtr> inner;
    inner.swap(out);
    out = std::move(saved);
    stmt(st_while(std::move(guard), seq_all(inner)));
  }

  // append src's bits to dst, scanning src left to right; src != dst
  void append_reg(const std::string& src, const std::string& dst, int sp) {
    const std::string pa = sreg(sp);
    assign(pa, se_eps());
    loop(se_not(se_sub(r_(src), pa)), [&] {
      loop(se_sub(se_app(r_(pa), 0), src), [&] {
        assign(pa, se_app(r_(pa), 0));
        assign(dst, se_app(r_(dst), 0));
      });
      loop(se_sub(se_app(r_(pa), 1), src), [&] {
        assign(pa, se_app(r_(pa), 1));
        assign(dst, se_app(r_(dst), 1));
      });
    });
  }

  // acc <- the prefix of val of length min(|val|, |bnd|); the three are distinct
  void truncate_reg(const std::string& val, const std::string& bnd, const std::string& acc,
                    int sp) {
    const std::string pb = sreg(sp), more = sreg(sp + 1), c = sreg(sp + 2), d = sreg(sp + 3);
    assign(acc, se_eps());
    assign(pb, se_eps());
    assign(more, se_not(se_sub(r_(bnd), pb)));
    loop(se_and(se_not(se_sub(r_(val), acc)), more), [&] {
      assign(c, se_sub(se_app(r_(acc), 0), val));
      set_bits(d, "1");
      loop(r_(c), [&] {
        assign(acc, se_app(r_(acc), 0));
        assign(c, se_eps());
        assign(d, se_eps());
      });
      loop(r_(d), [&] {
        assign(acc, se_app(r_(acc), 1));
        assign(d, se_eps());
      });
      assign(c, se_sub(se_app(r_(pb), 0), bnd));
      set_bits(d, "1");
      loop(r_(c), [&] {
        assign(pb, se_app(r_(pb), 0));
        assign(c, se_eps());
        assign(d, se_eps());
      });
      loop(r_(d), [&] {
        assign(pb, se_app(r_(pb), 1));
        assign(d, se_eps());
      });
      assign(more, se_not(se_sub(r_(bnd), pb)));
    });
  }

  void emit_bound(const BoundTerm& t, const std::vector<std::string>& args,
                  const std::string& dst, int sp) {
    switch (t.kind) {
      case BoundTerm::Eps:
        assign(dst, se_eps());
        return;
      case BoundTerm::Lit0:
        set_bits(dst, "0");
        return;
      case BoundTerm::Lit1:
        set_bits(dst, "1");
        return;
      case BoundTerm::Var:
        copy(dst, args[size_t(t.var - 1)]);
        return;
      case BoundTerm::Cat: {
        emit_bound(*t.a, args, dst, sp);
        switch (t.b->kind) {
          case BoundTerm::Eps:
            return;
          case BoundTerm::Lit0:
            assign(dst, se_app(r_(dst), 0));
            return;
          case BoundTerm::Lit1:
            assign(dst, se_app(r_(dst), 1));
            return;
          case BoundTerm::Var:
            append_reg(args[size_t(t.b->var - 1)], dst, sp);
            return;
          default: {
            const std::string rhs = sreg(sp);
            emit_bound(*t.b, args, rhs, sp + 1);
            append_reg(rhs, dst, sp + 1);
            return;
          }
        }
      }
      case BoundTerm::Times: {
        const std::string a = sreg(sp), b = sreg(sp + 1), p = sreg(sp + 2);
        emit_bound(*t.a, args, a, sp + 3);
        emit_bound(*t.b, args, b, sp + 3);
        assign(dst, se_eps());
        assign(p, se_eps());
        loop(se_not(se_sub(r_(b), p)), [&] {
          loop(se_sub(se_app(r_(p), 0), b), [&] {
            assign(p, se_app(r_(p), 0));
            append_reg(a, dst, sp + 3);
          });
          loop(se_sub(se_app(r_(p), 1), b), [&] {
            assign(p, se_app(r_(p), 1));
            append_reg(a, dst, sp + 3);
          });
        });
        return;
      }
    }
    throw std::logic_error("unhandled bound term");
  }

  void emit_cond(const std::vector<std::string>& env, const std::string& dst, int sp) {
    const std::string &a = env[0], &y = env[1], &z0 = env[2], &z1 = env[3];
    const std::string p = sreg(sp), last = sreg(sp + 1), f = sreg(sp + 2), ne = sreg(sp + 3);
    assign(p, se_eps());
    assign(last, se_eps());
    loop(se_not(se_sub(r_(a), p)), [&] {
      loop(se_sub(se_app(r_(p), 0), a), [&] {
        assign(p, se_app(r_(p), 0));
        set_bits(last, "0");
      });
      loop(se_sub(se_app(r_(p), 1), a), [&] {
        assign(p, se_app(r_(p), 1));
        set_bits(last, "1");
      });
    });
    assign(ne, se_not(se_sub(r_(last), "Y1")));
    assign(f, se_sub(r_(last), "Y1"));
    loop(r_(f), [&] {
      copy(dst, y);
      assign(f, se_eps());
    });
    assign(f, se_and(se_sub(r_(last), "Y2"), ne));
    loop(r_(f), [&] {
      copy(dst, z0);
      assign(f, se_eps());
    });
    assign(f, se_and(se_sub(r_(last), "Y3"), ne));
    loop(r_(f), [&] {
      copy(dst, z1);
      assign(f, se_eps());
    });
  }

  void emit_brec(const PorFn& fn, const std::vector<std::string>& env, const std::string& dst,
                 int sp) {
    const size_t n = env.size() - 1;
    const std::string& yr = env[n];
    const std::string acc = sreg(sp), p = sreg(sp + 1), c = sreg(sp + 2), d = sreg(sp + 3),
                      bnd = sreg(sp + 4), tmp = sreg(sp + 5);
    const int inner = sp + 6;
    std::vector<std::string> xs(env.begin(), env.begin() + long(n));
    std::vector<std::string> pred_args = xs;
    pred_args.push_back(p);
    std::vector<std::string> step_args = pred_args;
    step_args.push_back(acc);

    emit(*fn.g, xs, acc, inner);
    assign(p, se_eps());

    auto step = [&](const PorFn& h) {
      if (h.kind == PorFn::Proj && fn.t->kind == BoundTerm::Var && fn.t->var == h.i) {
        copy(acc, step_args[size_t(h.i - 1)]);
        return;
      }
      emit_bound(*fn.t, pred_args, bnd, inner);
      emit(h, step_args, tmp, inner);
      truncate_reg(tmp, bnd, acc, inner);
    };

    const bool shared = por_show(*fn.hs[0]) == por_show(*fn.hs[1]);
    loop(se_not(se_sub(r_(yr), p)), [&] {
      if (shared) step(*fn.hs[0]);
      assign(c, se_sub(se_app(r_(p), 0), yr));
      set_bits(d, "1");
      loop(r_(c), [&] {
        if (!shared) step(*fn.hs[0]);
        assign(p, se_app(r_(p), 0));
        assign(c, se_eps());
        assign(d, se_eps());
      });
      loop(r_(d), [&] {
        if (!shared) step(*fn.hs[1]);
        assign(p, se_app(r_(p), 1));
        assign(d, se_eps());
      });
    });
    copy(dst, acc);
  }

  void emit(const PorFn& f, const std::vector<std::string>& env, const std::string& dst,
            int sp) {
    switch (f.kind) {
      case PorFn::E:
        assign(dst, se_eps());
        return;
      case PorFn::Proj:
        copy(dst, env[size_t(f.i - 1)]);
        return;
      case PorFn::Succ:
        assign(dst, se_app(r_(env[0]), f.b));
        return;
      case PorFn::Query:
        stmt(st_flip(r_(env[0])));
        copy(dst, kOutputReg);
        return;
      case PorFn::Cond:
        emit_cond(env, dst, sp);
        return;
      case PorFn::Comp: {
        const int k = int(f.hs.size());
        std::vector<std::string> slots;
        for (int i = 0; i < k; ++i) slots.push_back(sreg(sp + i));
        for (int i = 0; i < k; ++i) emit(*f.hs[size_t(i)], env, slots[size_t(i)], sp + k);
        emit(*f.g, slots, dst, sp + k);
        return;
      }
      case PorFn::BRec:
        emit_brec(f, env, dst, sp);
        return;
    }
    throw std::logic_error("unhandled function kind");
  }
};

}  // namespace

SStmtPtr por_to_sifpra(const PorFn& f) {
  RaEmit em;
  if (has_cond(f)) {
    em.assign("Y1", se_eps());
    em.set_bits("Y2", "0");
    em.set_bits("Y3", "1");
  }
  std::vector<std::string> env;
  for (int i = 1; i <= arity(f); ++i) env.push_back("X" + std::to_string(i));
  em.emit(f, env, kOutputReg, 1);
  return seq_all(em.out);
}

BitString encode_kv_list(const std::vector<std::pair<BitString, int>>& entries) {
  BitString out;
  for (const auto& [key, val] : entries) {
    if (val != 0 && val != 1) throw std::invalid_argument("table value must be a bit");
    for (char c : key) {
      out += '1';
      out += c;
    }
    out += "01";
    out += '1';
    out += char('0' + val);
    out += "00";
  }
  return out;
}

std::vector<std::pair<BitString, int>> decode_kv_list(const BitString& s) {
  auto bad = [] { throw std::invalid_argument("malformed table encoding"); };
  std::vector<std::pair<BitString, int>> out;
  size_t i = 0;
  auto pair_at = [&](size_t j) {
    if (j + 1 >= s.size()) bad();
    return std::make_pair(s[j], s[j + 1]);
  };
  while (i < s.size()) {
    BitString key;
    for (;;) {
      auto [m, b] = pair_at(i);
      i += 2;
      if (m == '1') {
        key += b;
      } else if (b == '1') {
        break;  // separator 01
      } else {
        bad();
      }
    }
    auto [vm, vb] = pair_at(i);
    i += 2;
    if (vm != '1') bad();
    auto [t0, t1] = pair_at(i);
    i += 2;
    if (t0 != '0' || t1 != '0') bad();
    out.emplace_back(std::move(key), vb - '0');
  }
  return out;
}

namespace {

struct RegScan {
  std::set<std::string> regs;
  bool uses_t = false;
  int max_s = 0, max_x = 0;

  void reg(const std::string& id) {
    regs.insert(id);
    if (id == "T") uses_t = true;
    if (id.size() > 1 && id[0] == 'S') max_s = std::max(max_s, std::stoi(id.substr(1)));
    if (id.size() > 1 && id[0] == 'X') max_x = std::max(max_x, std::stoi(id.substr(1)));
  }

  void expr(const SifpExpr& e) {
    switch (e.kind) {
      case SifpExpr::Eps:
        return;
      case SifpExpr::App:
      case SifpExpr::Not:
        expr(*e.e);
        return;
      case SifpExpr::Reg:
        reg(e.reg);
        return;
      case SifpExpr::Sub:
      case SifpExpr::And:
        expr(*e.e);
        reg(e.reg);
        return;
    }
  }

  void stmt(const SifpStmt& s) {
    switch (s.kind) {
      case SifpStmt::Assign:
        reg(s.reg);
        expr(*s.e);
        return;
      case SifpStmt::Seq:
        stmt(*s.a);
        stmt(*s.b);
        return;
      case SifpStmt::While:
        expr(*s.e);
        stmt(*s.a);
        return;
      case SifpStmt::Flip:
        expr(*s.e);
        return;
      case SifpStmt::RandBit:
        return;
    }
  }
};

// lookup-or-draw over the reserved table register T; scratch block above the
// program's own S registers
SStmtPtr flip_gadget(const SExprPtr& coord, int base) {
  const std::string k = sreg(base), p = sreg(base + 1), w = sreg(base + 2), u = sreg(base + 3),
                    v = sreg(base + 4), f = sreg(base + 5), c = sreg(base + 6),
                    d = sreg(base + 7), g = sreg(base + 8), h = sreg(base + 9);
  RaEmit em;
  em.assign(k, coord);
  em.set_bits(f, "0");
  em.set_bits(v, "0");
  em.assign(p, se_eps());
  em.loop(se_not(se_sub(r_("T"), p)), [&] {
    em.assign(w, se_eps());
    em.set_bits(c, "1");
    em.loop(r_(c), [&] {
      em.assign(d, se_sub(se_app(r_(p), 1), "T"));
      em.loop(r_(d), [&] {  // payload pair 1b: append b to the key accumulator
        em.assign(p, se_app(r_(p), 1));
        em.assign(g, se_sub(se_app(r_(p), 1), "T"));
        em.set_bits(h, "1");
        em.loop(r_(g), [&] {
          em.assign(w, se_app(r_(w), 1));
          em.assign(p, se_app(r_(p), 1));
          em.assign(g, se_eps());
          em.assign(h, se_eps());
        });
        em.loop(r_(h), [&] {
          em.assign(w, se_app(r_(w), 0));
          em.assign(p, se_app(r_(p), 0));
          em.assign(h, se_eps());
        });
        em.assign(d, se_eps());
      });
      em.assign(d, se_not(se_sub(se_app(r_(p), 1), "T")));
      em.loop(r_(d), [&] {  // separator 01 ends the key
        em.assign(p, se_app(r_(p), 0));
        em.assign(p, se_app(r_(p), 1));
        em.assign(c, se_eps());
        em.assign(d, se_eps());
      });
    });
    em.assign(p, se_app(r_(p), 1));  // value marker
    em.assign(c, se_sub(se_app(r_(p), 1), "T"));
    em.set_bits(d, "1");
    em.loop(r_(c), [&] {
      em.set_bits(u, "1");
      em.assign(p, se_app(r_(p), 1));
      em.assign(c, se_eps());
      em.assign(d, se_eps());
    });
    em.loop(r_(d), [&] {
      em.set_bits(u, "0");
      em.assign(p, se_app(r_(p), 0));
      em.assign(d, se_eps());
    });
    em.assign(p, se_app(r_(p), 0));  // terminator 00
    em.assign(p, se_app(r_(p), 0));
    em.assign(c, se_sub(r_(k), w));
    em.assign(d, se_and(se_sub(r_(w), k), c));
    em.loop(r_(d), [&] {  // key match: replay the recorded bit
      em.set_bits(f, "1");
      em.copy(v, u);
      em.assign(d, se_eps());
    });
  });
  em.assign(c, se_not(r_(f)));
  em.loop(r_(c), [&] {  // fresh coordinate: draw and record
    em.stmt(st_randbit());
    em.copy(v, kOutputReg);
    em.assign(p, se_eps());
    em.loop(se_not(se_sub(r_(k), p)), [&] {
      em.assign(d, se_sub(se_app(r_(p), 0), k));
      em.set_bits(g, "1");
      em.loop(r_(d), [&] {
        em.assign("T", se_app(r_("T"), 1));
        em.assign("T", se_app(r_("T"), 0));
        em.assign(p, se_app(r_(p), 0));
        em.assign(d, se_eps());
        em.assign(g, se_eps());
      });
      em.loop(r_(g), [&] {
        em.assign("T", se_app(r_("T"), 1));
        em.assign("T", se_app(r_("T"), 1));
        em.assign(p, se_app(r_(p), 1));
        em.assign(g, se_eps());
      });
    });
    em.assign("T", se_app(r_("T"), 0));  // separator
    em.assign("T", se_app(r_("T"), 1));
    em.assign("T", se_app(r_("T"), 1));  // value marker
    em.assign(d, se_not(r_(v)));
    em.set_bits(g, "1");
    em.loop(r_(d), [&] {
      em.assign("T", se_app(r_("T"), 0));
      em.assign(d, se_eps());
      em.assign(g, se_eps());
    });
    em.loop(r_(g), [&] {
      em.assign("T", se_app(r_("T"), 1));
      em.assign(g, se_eps());
    });
    em.assign("T", se_app(r_("T"), 0));  // terminator
    em.assign("T", se_app(r_("T"), 0));
    em.assign(c, se_eps());
  });
  em.assign(kOutputReg, r_(v));
  return seq_all(em.out);
}

SStmtPtr rewrite_flips(const SStmtPtr& s, int base) {
  switch (s->kind) {
    case SifpStmt::Assign:
    case SifpStmt::RandBit:
      return s;
    case SifpStmt::Seq: {
      SStmtPtr a = rewrite_flips(s->a, base), b = rewrite_flips(s->b, base);
      if (a == s->a && b == s->b) return s;
      return st_seq(std::move(a), std::move(b));
    }
    case SifpStmt::While: {
      SStmtPtr body = rewrite_flips(s->a, base);
      if (body == s->a) return s;
      return st_while(s->e, std::move(body));
    }
    case SifpStmt::Flip:
      return flip_gadget(s->e, base);
  }
  throw std::logic_error("unhandled statement kind");
}

}  // namespace

SStmtPtr sifpra_to_sifpla(const SifpStmt& p) {
  if (!is_ra(p)) throw std::invalid_argument("randbit statement in a flip program");
  RegScan sc;
  sc.stmt(p);
  if (sc.uses_t) throw std::invalid_argument("program uses the reserved table register T");
  // shared_ptr identity only matters for the rewrite; re-wrap the root
  SStmtPtr root = std::make_shared<const SifpStmt>(p);
  return rewrite_flips(root, sc.max_s + 1);
}

namespace {

constexpr char kBits[] = {'0', '1'};

struct OdBuilder {
  int ntapes;
  int et;  // expression scratch tape
  std::map<std::string, int> tape_of;
  std::vector<StmTrans> table;
  int nstates = 0;

  struct Act {
    int tape;
    char read, write, move;
  };

  int alloc() {
    if (nstates >= kOdStateCap) throw std::runtime_error("od compile: state cap exceeded");
    return nstates++;
  }

  void add(int from, std::initializer_list<Act> acts, OdTag tag, int to) {
    std::string rd(size_t(ntapes), kBlank), wr(size_t(ntapes), kBlank), mv(size_t(ntapes), 'S');
    for (const Act& a : acts) {
      rd[size_t(a.tape)] = a.read;
      wr[size_t(a.tape)] = a.write;
      mv[size_t(a.tape)] = a.move;
    }
    table.push_back({from, std::move(rd), tag, std::move(wr), std::move(mv), to});
  }

  // like add, but tape w's head is mid-value: emit one row per possible symbol
  void add_wild(int from, std::initializer_list<Act> acts, int w, OdTag tag, int to) {
    for (char ch : {'0', '1', '_'}) {
      std::vector<Act> acts2(acts);
      acts2.push_back({w, ch, ch, 'S'});
      std::string rd(size_t(ntapes), kBlank), wr(size_t(ntapes), kBlank), mv(size_t(ntapes), 'S');
      for (const Act& a : acts2) {
        rd[size_t(a.tape)] = a.read;
        wr[size_t(a.tape)] = a.write;
        mv[size_t(a.tape)] = a.move;
      }
      table.push_back({from, std::move(rd), tag, std::move(wr), std::move(mv), to});
    }
  }

  // Heads rest on the blank cell just left of the value ("parked"); every op
  // below is park-to-park on the tapes it touches, so inactive tapes always
  // read blank.

  // park -> blank cell right of the value's last bit
  int walk_end(int t, int exit) {
    int s0 = alloc(), s1 = alloc();
    add(s0, {{t, '_', '_', 'R'}}, OdTag::Skip, s1);
    for (char b : kBits) add(s1, {{t, b, b, 'R'}}, OdTag::Skip, s1);
    add(s1, {{t, '_', '_', 'S'}}, OdTag::Skip, exit);
    return s0;
  }

  // anywhere right of park -> park; pass wild >= 0 when another head is still
  // mid-value while this tape rewinds
  int rewind(int t, int exit, int wild = -1) {
    int s0 = alloc(), s1 = alloc();
    for (char ch : {'0', '1', '_'}) {
      if (wild < 0)
        add(s0, {{t, ch, ch, 'L'}}, OdTag::Skip, s1);
      else
        add_wild(s0, {{t, ch, ch, 'L'}}, wild, OdTag::Skip, s1);
    }
    for (char b : kBits) {
      if (wild < 0)
        add(s1, {{t, b, b, 'L'}}, OdTag::Skip, s1);
      else
        add_wild(s1, {{t, b, b, 'L'}}, wild, OdTag::Skip, s1);
    }
    if (wild < 0)
      add(s1, {{t, '_', '_', 'S'}}, OdTag::Skip, exit);
    else
      add_wild(s1, {{t, '_', '_', 'S'}}, wild, OdTag::Skip, exit);
    return s0;
  }

  int clear(int t, int exit) {
    int s0 = alloc(), s1 = alloc(), s2 = alloc();
    add(s0, {{t, '_', '_', 'R'}}, OdTag::Skip, s1);
    for (char b : kBits) add(s1, {{t, b, b, 'R'}}, OdTag::Skip, s1);
    add(s1, {{t, '_', '_', 'L'}}, OdTag::Skip, s2);
    for (char b : kBits) add(s2, {{t, b, '_', 'L'}}, OdTag::Skip, s2);
    add(s2, {{t, '_', '_', 'S'}}, OdTag::Skip, exit);
    return s0;
  }

  int append_many(int t, const std::string& bits, int exit) {
    int next = rewind(t, exit);
    for (size_t i = bits.size(); i-- > 0;) {
      int s = alloc();
      add(s, {{t, '_', bits[i], 'R'}}, OdTag::Skip, next);
      next = s;
    }
    int s0 = alloc(), s1 = alloc();
    add(s0, {{t, '_', '_', 'R'}}, OdTag::Skip, s1);
    for (char b : kBits) add(s1, {{t, b, b, 'R'}}, OdTag::Skip, s1);
    add(s1, {{t, '_', '_', 'S'}}, OdTag::Skip, next);
    return s0;
  }

  // append src's value to dst's; src != dst
  int copy_append(int src, int dst, int exit) {
    int d0 = alloc(), d1 = alloc(), s0 = alloc(), cmp = alloc(), rw = alloc(), rw2 = alloc();
    add(d0, {{dst, '_', '_', 'R'}}, OdTag::Skip, d1);
    for (char b : kBits) add(d1, {{dst, b, b, 'R'}}, OdTag::Skip, d1);
    add(d1, {{dst, '_', '_', 'S'}}, OdTag::Skip, s0);
    add(s0, {{src, '_', '_', 'R'}}, OdTag::Skip, cmp);
    for (char b : kBits)
      add(cmp, {{src, b, b, 'R'}, {dst, '_', b, 'R'}}, OdTag::Skip, cmp);
    add(cmp, {{src, '_', '_', 'L'}, {dst, '_', '_', 'L'}}, OdTag::Skip, rw);
    for (char a : kBits)
      for (char b : kBits) add(rw, {{src, a, a, 'L'}, {dst, b, b, 'L'}}, OdTag::Skip, rw);
    for (char b : kBits) add(rw, {{src, '_', '_', 'S'}, {dst, b, b, 'L'}}, OdTag::Skip, rw2);
    add(rw, {{src, '_', '_', 'S'}, {dst, '_', '_', 'S'}}, OdTag::Skip, exit);
    for (char b : kBits) add(rw2, {{dst, b, b, 'L'}}, OdTag::Skip, rw2);
    add(rw2, {{dst, '_', '_', 'S'}}, OdTag::Skip, exit);
    return d0;
  }

  // [[p]] followed by extra a prefix of [[src]]?  p != src
  int test_prefix(int p, const std::string& extra, int src, int tx, int fx) {
    int rt = rewind(p, rewind(src, tx), src);
    int rf = rewind(p, rewind(src, fx), src);
    // after p is exhausted, match the extra bits against src alone
    int chain = rt;
    for (size_t i = extra.size(); i-- > 0;) {
      int s = alloc();
      char b = extra[i];
      add(s, {{src, b, b, 'R'}}, OdTag::Skip, chain);
      for (char ch : {'0', '1', '_'})
        if (ch != b) add(s, {{src, ch, ch, 'S'}}, OdTag::Skip, rf);
      chain = s;
    }
    int cmp = alloc();
    for (char b : kBits) {
      char o = b == '0' ? '1' : '0';
      add(cmp, {{p, b, b, 'R'}, {src, b, b, 'R'}}, OdTag::Skip, cmp);
      add(cmp, {{p, b, b, 'S'}, {src, o, o, 'S'}}, OdTag::Skip, rf);
      add(cmp, {{p, b, b, 'S'}, {src, '_', '_', 'S'}}, OdTag::Skip, rf);
    }
    for (char ch : {'0', '1', '_'})
      add(cmp, {{p, '_', '_', 'S'}, {src, ch, ch, 'S'}}, OdTag::Skip, chain);
    int e1 = alloc(), e0 = alloc();
    add_wild(e1, {{src, '_', '_', 'R'}}, p, OdTag::Skip, cmp);
    add(e0, {{p, '_', '_', 'R'}}, OdTag::Skip, e1);
    return e0;
  }

  // bits a prefix of [[src]]?  bits nonempty
  int test_bits_prefix(const std::string& bits, int src, int tx, int fx) {
    int rt = rewind(src, tx), rf = rewind(src, fx);
    int chain = rt;
    for (size_t i = bits.size(); i-- > 0;) {
      int s = alloc();
      char b = bits[i];
      add(s, {{src, b, b, 'R'}}, OdTag::Skip, chain);
      for (char ch : {'0', '1', '_'})
        if (ch != b) add(s, {{src, ch, ch, 'S'}}, OdTag::Skip, rf);
      chain = s;
    }
    int e0 = alloc();
    add(e0, {{src, '_', '_', 'R'}}, OdTag::Skip, chain);
    return e0;
  }

  // value equal to the single bit b?
  int test_is_bit(int t, char b, int tx, int fx) {
    int rt = rewind(t, tx), rf = rewind(t, fx);
    char o = b == '0' ? '1' : '0';
    int e0 = alloc(), c1 = alloc(), c2 = alloc();
    add(e0, {{t, '_', '_', 'R'}}, OdTag::Skip, c1);
    add(c1, {{t, b, b, 'R'}}, OdTag::Skip, c2);
    add(c1, {{t, o, o, 'S'}}, OdTag::Skip, rf);
    add(c1, {{t, '_', '_', 'S'}}, OdTag::Skip, rf);
    add(c2, {{t, '_', '_', 'S'}}, OdTag::Skip, rt);
    for (char ch : kBits) add(c2, {{t, ch, ch, 'S'}}, OdTag::Skip, rf);
    return e0;
  }

  int test_is_empty(int t, int tx, int fx) {
    int rt = rewind(t, tx), rf = rewind(t, fx);
    int e0 = alloc(), c1 = alloc();
    add(e0, {{t, '_', '_', 'R'}}, OdTag::Skip, c1);
    add(c1, {{t, '_', '_', 'S'}}, OdTag::Skip, rt);
    for (char ch : kBits) add(c1, {{t, ch, ch, 'S'}}, OdTag::Skip, rf);
    return e0;
  }

  // the only consuming gadget: one fresh bit into the cleared tape
  int randbit_draw(int t, int exit) {
    int p0 = alloc(), p1 = alloc(), p2 = alloc();
    add(p0, {{t, '_', '_', 'R'}}, OdTag::Skip, p1);
    add(p1, {{t, '_', '0', 'L'}}, OdTag::Bit0, p2);
    add(p1, {{t, '_', '1', 'L'}}, OdTag::Bit1, p2);
    add(p2, {{t, '_', '_', 'S'}}, OdTag::Skip, exit);
    return p0;
  }

  static const SifpExpr* strip_bits(const SifpExpr& e, std::string& bits) {
    const SifpExpr* q = &e;
    while (q->kind == SifpExpr::App) {
      bits += char('0' + q->bit);
      q = q->e.get();
    }
    std::reverse(bits.begin(), bits.end());
    return q;
  }

  static bool boolean_kind(const SifpExpr& e) {
    return e.kind == SifpExpr::Sub || e.kind == SifpExpr::And || e.kind == SifpExpr::Not;
  }

  // branch on [[e]] == "1"
  int test(const SifpExpr& e, int tx, int fx) {
    switch (e.kind) {
      case SifpExpr::Eps:
        return fx;
      case SifpExpr::Reg:
        return test_is_bit(tape_of.at(e.reg), '1', tx, fx);
      case SifpExpr::Not:
        return test_zero(*e.e, tx, fx);
      case SifpExpr::And:
        return test(*e.e, test_is_bit(tape_of.at(e.reg), '1', tx, fx), fx);
      case SifpExpr::Sub: {
        std::string bits;
        const SifpExpr* base = strip_bits(*e.e, bits);
        int rt = tape_of.at(e.reg);
        if (base->kind == SifpExpr::Reg) {
          int pt = tape_of.at(base->reg);
          if (pt == rt) return bits.empty() ? tx : fx;  // v.w prefix of v iff w empty
          return test_prefix(pt, bits, rt, tx, fx);
        }
        if (base->kind == SifpExpr::Eps)
          return bits.empty() ? tx : test_bits_prefix(bits, rt, tx, fx);
        return eval_expr(*e.e, test_prefix(et, "", rt, tx, fx));
      }
      case SifpExpr::App: {
        std::string bits;
        const SifpExpr* base = strip_bits(e, bits);
        if (base->kind == SifpExpr::Eps) return bits == "1" ? tx : fx;
        if (base->kind == SifpExpr::Reg)
          return bits == "1" ? test_is_empty(tape_of.at(base->reg), tx, fx) : fx;
        return fx;  // boolean bit plus appended bits is never "1"
      }
    }
    throw std::logic_error("unhandled expression kind");
  }

  // branch on [[e]] == "0"
  int test_zero(const SifpExpr& e, int tx, int fx) {
    switch (e.kind) {
      case SifpExpr::Eps:
        return fx;
      case SifpExpr::Reg:
        return test_is_bit(tape_of.at(e.reg), '0', tx, fx);
      case SifpExpr::Not:
        return test_zero(*e.e, fx, tx);  // negation output is always a bit
      case SifpExpr::And:
      case SifpExpr::Sub:
        return test(e, fx, tx);
      case SifpExpr::App: {
        std::string bits;
        const SifpExpr* base = strip_bits(e, bits);
        if (base->kind == SifpExpr::Eps) return bits == "0" ? tx : fx;
        if (base->kind == SifpExpr::Reg)
          return bits == "0" ? test_is_empty(tape_of.at(base->reg), tx, fx) : fx;
        return fx;
      }
    }
    throw std::logic_error("unhandled expression kind");
  }

  // value of e onto the scratch tape
  int eval_expr(const SifpExpr& e, int exit) {
    std::string bits;
    const SifpExpr* base = strip_bits(e, bits);
    if (base->kind == SifpExpr::Reg) {
      int tail = bits.empty() ? exit : append_many(et, bits, exit);
      return clear(et, copy_append(tape_of.at(base->reg), et, tail));
    }
    if (base->kind == SifpExpr::Eps) {
      int tail = bits.empty() ? exit : append_many(et, bits, exit);
      return clear(et, tail);
    }
    int t1 = clear(et, append_many(et, "1" + bits, exit));
    int t0 = clear(et, append_many(et, "0" + bits, exit));
    return test(*base, t1, t0);
  }

  int assign(const std::string& reg, const SifpExpr& e, int exit) {
    std::string bits;
    const SifpExpr* base = strip_bits(e, bits);
    int rt = tape_of.at(reg);
    if (base->kind == SifpExpr::Reg) {
      int st = tape_of.at(base->reg);
      if (st == rt) return bits.empty() ? exit : append_many(rt, bits, exit);
      int tail = bits.empty() ? exit : append_many(rt, bits, exit);
      return clear(rt, copy_append(st, rt, tail));
    }
    if (base->kind == SifpExpr::Eps)
      return clear(rt, bits.empty() ? exit : append_many(rt, bits, exit));
    // boolean result bit, then any appended literal bits
    int t1 = clear(rt, append_many(rt, "1" + bits, exit));
    int t0 = clear(rt, append_many(rt, "0" + bits, exit));
    return test(*base, t1, t0);
  }

  int compile(const SifpStmt& s, int exit) {
    switch (s.kind) {
      case SifpStmt::Assign:
        return assign(s.reg, *s.e, exit);
      case SifpStmt::Seq:
        return compile(*s.a, compile(*s.b, exit));
      case SifpStmt::While: {
        int head = alloc();
        int body = compile(*s.a, head);
        int tst = test(*s.e, body, exit);
        add(head, {}, OdTag::Skip, tst);
        return head;
      }
      case SifpStmt::RandBit:
        return clear(tape_of.at(kOutputReg), randbit_draw(tape_of.at(kOutputReg), exit));
      case SifpStmt::Flip:
        break;
    }
    throw std::logic_error("unhandled statement kind");
  }
};

int reg_class(const std::string& id) {
  switch (id[0]) {
    case 'R': return 0;
    case 'X': return 1;
    case 'Y': return 2;
    case 'S': return 3;
    default: return 4;
  }
}

bool reg_order(const std::string& a, const std::string& b) {
  int ca = reg_class(a), cb = reg_class(b);
  if (ca != cb) return ca < cb;
  if (a.size() != b.size()) return a.size() < b.size();  // X2 before X10
  return a < b;
}

}  // namespace

OdMachine sifpla_to_odstm(const SifpStmt& p) {
  if (!is_la(p)) throw std::invalid_argument("flip statement in a randbit program");
  RegScan sc;
  sc.stmt(p);
  sc.regs.insert(kOutputReg);
  std::vector<std::string> names(sc.regs.begin(), sc.regs.end());
  std::sort(names.begin(), names.end(), reg_order);
  if (int(names.size()) + 1 > kOdTapeCap) throw std::runtime_error("od compile: tape cap exceeded");

  OdBuilder b;
  b.ntapes = int(names.size()) + 1;
  b.et = int(names.size());
  for (int i = 0; i < int(names.size()); ++i) b.tape_of[names[size_t(i)]] = i;

  int halt = b.alloc();
  int out = b.walk_end(0, halt);  // accept past the end of R's value
  int entry = b.compile(p, out);
  OdMachine m;
  m.spec = stm_make(b.nstates, entry, b.ntapes, std::move(b.table));
  m.tapes = std::move(names);
  m.input_arity = sc.max_x;
  return m;
}

StmConfig od_init(const StmSpec& spec, const std::vector<std::string>& tapes,
                  const std::vector<BitString>& inputs, BitStream stream) {
  std::vector<BitString> contents(size_t(spec.tapes));
  for (size_t i = 0; i < inputs.size(); ++i) {
    auto it = std::find(tapes.begin(), tapes.end(), "X" + std::to_string(i + 1));
    if (it == tapes.end()) continue;  // the program never reads this argument
    contents[size_t(it - tapes.begin())] = "_" + inputs[i];
  }
  return stm_init_tapes(spec, contents, std::move(stream));
}

StmConfig od_init(const OdMachine& m, const std::vector<BitString>& inputs, BitStream stream) {
  return od_init(m.spec, m.tapes, inputs, std::move(stream));
}

PtmConfig od_init_ptm(const PtmSpec& spec, const std::vector<std::string>& tapes,
                      const std::vector<BitString>& inputs) {
  std::vector<BitString> contents(size_t(spec.tapes));
  for (size_t i = 0; i < inputs.size(); ++i) {
    auto it = std::find(tapes.begin(), tapes.end(), "X" + std::to_string(i + 1));
    if (it == tapes.end()) continue;
    contents[size_t(it - tapes.begin())] = "_" + inputs[i];
  }
  return ptm_init_tapes(spec, contents);
}

PipelineBundle build_pipeline(PorPtr f) {
  PipelineBundle b;
  b.source = std::move(f);
  b.stage_ra = por_to_sifpra(*b.source);
  b.stage_la = sifpra_to_sifpla(*b.stage_ra);
  b.stage_od = sifpla_to_odstm(*b.stage_la);
  b.stage_stm = h_encode(b.stage_od.spec);
  b.stage_ptm = stm_to_ptm(b.stage_stm);
  b.provenance = {"por_to_sifpra v1", "sifpra_to_sifpla v1", "sifpla_to_odstm v1",
                  "h_encode v1", "stm_to_ptm v1"};
  return b;
}

namespace {

std::string digest(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::string pipeline_manifest(const PipelineBundle& b) {
  std::string out;
  out += "source " + digest(por_show(*b.source)) + "\n";
  out += "stage_ra " + digest(sifp_show(*b.stage_ra)) + "\n";
  out += "stage_la " + digest(sifp_show(*b.stage_la)) + "\n";
  out += "stage_od " + digest(stm_show(b.stage_od.spec)) + "\n";
  out += "stage_stm " + digest(stm_show(b.stage_stm)) + "\n";
  out += "stage_ptm " + digest(ptm_show(b.stage_ptm)) + "\n";
  return out;
}

}  // namespace porlab
