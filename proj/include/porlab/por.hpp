#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "porlab/oracle.hpp"

namespace porlab {

// bound terms for bounded recursion: built from eps, 0, 1, variables, ^ and x
struct BoundTerm;
using BoundPtr = std::shared_ptr<const BoundTerm>;

struct BoundTerm {
  enum Kind { Eps, Lit0, Lit1, Var, Cat, Times } kind;
  int var = 0;  // 1-based
  BoundPtr a, b;
};

BoundPtr bt_eps();
BoundPtr bt_lit(int bit);
BoundPtr bt_var(int i);
BoundPtr bt_cat(BoundPtr a, BoundPtr b);
BoundPtr bt_times(BoundPtr a, BoundPtr b);
int bt_max_var(const BoundTerm& t);
BitString bt_eval(const BoundTerm& t, const std::vector<BitString>& args);
BoundPtr bt_subst(const BoundTerm& t, const std::vector<BoundPtr>& map);
std::string bt_show(const BoundTerm& t, int arity_without_y);

// POR functions S^k x O -> S:
//   E(x) := eps                      P^n_i(x1..xn) := xi
//   S_b(x) := x.b                    C(eps,y,z0,z1) := y, C(x0,..) := z0, C(x1,..) := z1
//   Q(x) := eta(x)
//   Comp: f(xs) := g(h1(xs), .., hk(xs))
//   BRec: f(xs,eps) := g(xs), f(xs,yb) := h_b(xs,y,f(xs,y))|_{t(xs,y)}
struct PorFn;
using PorPtr = std::shared_ptr<const PorFn>;

struct PorFn {
  enum Kind { E, Proj, Succ, Cond, Query, Comp, BRec } kind;
  int n = 1, i = 1;         // Proj
  int b = 0;                // Succ
  PorPtr g;                 // Comp, BRec
  std::vector<PorPtr> hs;   // Comp: h_1..h_k ; BRec: h_0, h_1
  BoundPtr t;               // BRec
};

int arity(const PorFn& f);
PorPtr por_e();
PorPtr por_proj(int n, int i);
PorPtr por_succ(int bit);
PorPtr por_cond();
PorPtr por_query();
PorPtr por_comp(PorPtr g, std::vector<PorPtr> hs);
PorPtr por_brec(PorPtr g, PorPtr h0, PorPtr h1, BoundPtr t);

BitString eval(const PorFn& f, const std::vector<BitString>& args, const OracleIface& eta,
               long long fuel = kDefaultFuel);

// exact output distribution under a uniformly random oracle: evaluation forks
// on each fresh queried coordinate, leaf weight 2^-(#distinct coordinates)
Distribution eval_dist(const PorFn& f, const std::vector<BitString>& args,
                       long long fuel = kDefaultFuel, int coord_cap = kDefaultBranchCap);

// structural length bound: |eval(f, xs, eta)| <= |bt_eval(size_bound(f), xs)|
BoundPtr size_bound(const PorFn& f);

// every coordinate f can query on the given input, under any oracle
std::vector<BitString> por_coords(const PorFn& f, const std::vector<BitString>& args,
                                  long long fuel = kDefaultFuel,
                                  int coord_cap = kDefaultBranchCap);

// derived functions, all built from the six constructors
std::map<std::string, PorPtr> por_stdlib();

PorPtr por_parse(const std::string& src);
std::string por_show(const PorFn& f);

}  // namespace porlab
