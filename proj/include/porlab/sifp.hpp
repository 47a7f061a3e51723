#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "porlab/bitstring.hpp"
#include "porlab/dyadic.hpp"
#include "porlab/oracle.hpp"

namespace porlab {

// Imperative stream languages over bit-string registers. Two dialects share
// expressions and control flow and differ in the random primitive: flip(e)
// reads oracle coordinate [[e]], randbit() consumes the next stream bit.

// registers X1 X2 .., Y1 .., S1 .., and the specials R Q Z T
bool valid_register(const std::string& id);

struct SifpExpr;
using SExprPtr = std::shared_ptr<const SifpExpr>;

struct SifpExpr {
  enum Kind { Eps, App, Reg, Sub, And, Not } kind;
  SExprPtr e;       // App, Sub, And, Not
  int bit = 0;      // App
  std::string reg;  // Reg, Sub, And
};

SExprPtr se_eps();
SExprPtr se_app(SExprPtr e, int bit);
SExprPtr se_reg(std::string id);
SExprPtr se_sub(SExprPtr e, std::string id);
SExprPtr se_and(SExprPtr e, std::string id);
SExprPtr se_not(SExprPtr e);

struct SifpStmt;
using SStmtPtr = std::shared_ptr<const SifpStmt>;

struct SifpStmt {
  enum Kind { Assign, Seq, While, Flip, RandBit } kind;
  std::string reg;     // Assign target
  SExprPtr e;          // Assign, While guard, Flip
  SStmtPtr a, b;       // Seq; While body in a
  bool has_flip = false, has_randbit = false;
};

SStmtPtr st_assign(std::string id, SExprPtr e);
SStmtPtr st_seq(SStmtPtr s, SStmtPtr t);  // throws if it would mix the dialects
SStmtPtr st_while(SExprPtr e, SStmtPtr s);
SStmtPtr st_flip(SExprPtr e);
SStmtPtr st_randbit();

inline bool is_ra(const SifpStmt& p) { return !p.has_randbit; }
inline bool is_la(const SifpStmt& p) { return !p.has_flip; }

// total with default eps
struct Store {
  std::map<std::string, BitString> regs;

  BitString get(const std::string& id) const;
  void set(const std::string& id, BitString v);
};

inline const char kOutputReg[] = "R";

BitString eval_expr(const SifpExpr& e, const Store& s);

// big-step run; fuel counts rule applications
Store run_ra(const SifpStmt& p, Store s, const OracleIface& eta, long long fuel = kDefaultFuel);
std::pair<Store, size_t> run_la(const SifpStmt& p, Store s, BitStream omega,
                                long long fuel = kDefaultFuel);

// exact distribution of the final value of R: flip branches on fresh oracle
// coordinates, randbit on every stream bit
Distribution run_ra_dist(const SifpStmt& p, const Store& s, long long fuel = kDefaultFuel,
                         int coord_cap = kDefaultBranchCap);
Distribution run_la_dist(const SifpStmt& p, const Store& s, long long fuel = kDefaultFuel,
                         int bit_cap = kDefaultBranchCap);

SStmtPtr sifp_parse(const std::string& src);
SExprPtr sifp_parse_expr(const std::string& src);
std::string sifp_show(const SifpStmt& p);
std::string sifp_show_expr(const SifpExpr& e);

}  // namespace porlab
