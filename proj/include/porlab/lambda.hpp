#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "porlab/bitstring.hpp"
#include "porlab/por.hpp"

namespace porlab {

// Simply typed lambda calculus over one base type s of oracle-fed bit
// strings, with constants for the string algebra and bounded recursion.

struct LType;
using LTypePtr = std::shared_ptr<const LType>;

struct LType {
  bool base = true;  // s
  LTypePtr from, to;  // from => to when !base
};

LTypePtr ty_s();
LTypePtr ty_arrow(LTypePtr from, LTypePtr to);
bool ty_equal(const LTypePtr& a, const LTypePtr& b);
std::string ty_show(const LTypePtr& t);

enum class LConst {
  Zero,      // the one-bit string 0
  One,       // the one-bit string 1
  Eps,       // the empty string
  Cat,       // append, written o
  Tail,      // drop the last bit
  Trunc,     // truncate to the length of the second argument
  Cond,      // case split on empty / ends-in-0 / ends-in-1
  Flipcoin,  // oracle query
  Times,     // repeat the first string once per bit of the second
  Rec,       // bounded recursion on notation
};

LTypePtr const_type(LConst c);
const char* const_name(LConst c);

struct LTerm;
using LTermPtr = std::shared_ptr<const LTerm>;

struct LTerm {
  enum class Kind { Var, Const, Lam, App } kind;
  std::string var;       // Var, Lam
  LConst cst{};          // Const
  LTypePtr ann;          // Lam annotation
  LTermPtr body;         // Lam
  LTermPtr fn, arg;      // App
};

LTermPtr lt_var(std::string name);
LTermPtr lt_const(LConst c);
LTermPtr lt_lam(std::string var, LTypePtr ann, LTermPtr body);
LTermPtr lt_app(LTermPtr fn, LTermPtr arg);
LTermPtr lt_apps(LTermPtr fn, const std::vector<LTermPtr>& args);

// Numerals: the string b1..bk denotes (..(eps o b1)..) o bk.
LTermPtr lt_numeral(const BitString& s);

// Exact numeral shape (eps-rooted append chain of bit constants).
bool is_numeral(const LTermPtr& t);
// Any closed append chain of eps/0/1 constants; its denoted string.
std::optional<BitString> value_of(const LTermPtr& t);

std::vector<std::string> lam_free_vars(const LTermPtr& t);

// Type inference for closed terms (or under the given context).
// Throws std::runtime_error naming the offending subterm.
LTypePtr typecheck(const LTermPtr& t,
                   const std::map<std::string, LTypePtr>& ctx = {});

using FlipTable = std::map<BitString, int>;

// Leftmost-outermost beta/delta normalisation under a fixed oracle table.
// Missing table entries throw OracleMiss; fuel is a step budget
// (FuelExhausted past it). With check_types, every step re-infers the
// type and asserts it unchanged. Closed string results come back as
// numerals; eta-contraction runs once at the end.
LTermPtr normalize(const LTermPtr& t, const FlipTable& table,
                   long long fuel = kDefaultFuel, bool check_types = false);

// Inverse of lt_numeral on normal forms denoting strings.
BitString denumeral(const LTermPtr& t);

// Named closed terms: B, BNeg, BOr, BAnd, Eps, Bool, Zero, Conc, Sub,
// Eq, Times.
const std::map<std::string, LTermPtr>& lambda_stdlib();

// Compositional translation; the result provably represents f.
LTermPtr por_to_lambda(const PorFn& f);

// Partial inverse on the first-order fragment the translation emits
// (constants, numerals, applied closed lambdas, recursion in schema
// shape). Anything else throws with an explanation.
PorPtr lambda_to_por(const LTermPtr& t);

LTermPtr lambda_parse(const std::string& src);
std::string lambda_show(const LTermPtr& t);

}  // namespace porlab
