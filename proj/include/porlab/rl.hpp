#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "porlab/oracle.hpp"
#include "porlab/por.hpp"

namespace porlab {

// terms of the word language: eps, 0, 1, variables, concatenation, repetition
struct RlTerm;
using RlTermPtr = std::shared_ptr<const RlTerm>;

struct RlTerm {
  enum Kind { Var, Eps, Lit0, Lit1, Cat, Times } kind;
  std::string var;
  RlTermPtr a, b;
};

RlTermPtr rt_var(std::string name);
RlTermPtr rt_eps();
RlTermPtr rt_lit(int bit);
RlTermPtr rt_cat(RlTermPtr a, RlTermPtr b);
RlTermPtr rt_times(RlTermPtr a, RlTermPtr b);
RlTermPtr rt_string(const BitString& s);  // eps or a concat chain of literals

// formulas: Flip(t), t = s, t sub s (initial subword), connectives, quantifiers.
// quantifier ranges: LenLe t  = strings no longer than the value of t,
//                    Subword t = contiguous substrings, InitialSub t = prefixes
struct RlFormula;
using RlFormulaPtr = std::shared_ptr<const RlFormula>;

enum class QuantRange { Unbounded, LenLe, Subword, InitialSub };

struct RlFormula {
  enum Kind { Flip, Eq, SubInit, Not, And, Or, Imp, Exists, Forall } kind;
  RlTermPtr t, s;     // atoms; t doubles as the quantifier range term
  RlFormulaPtr f, g;  // connective children; f is the quantifier body
  std::string var;    // quantified variable
  QuantRange range = QuantRange::Unbounded;
};

RlFormulaPtr rf_flip(RlTermPtr t);
RlFormulaPtr rf_eq(RlTermPtr t, RlTermPtr s);
RlFormulaPtr rf_sub(RlTermPtr t, RlTermPtr s);
RlFormulaPtr rf_not(RlFormulaPtr f);
RlFormulaPtr rf_and(RlFormulaPtr f, RlFormulaPtr g);
RlFormulaPtr rf_or(RlFormulaPtr f, RlFormulaPtr g);
RlFormulaPtr rf_imp(RlFormulaPtr f, RlFormulaPtr g);
RlFormulaPtr rf_quant(RlFormula::Kind q, std::string var, QuantRange range, RlTermPtr bound,
                      RlFormulaPtr body);

using Environment = std::map<std::string, BitString>;

void rl_free_vars(const RlTerm& t, std::vector<std::string>& out);
void rl_free_vars(const RlFormula& f, std::vector<std::string>& out);

inline constexpr long long kDefaultQuantCap = 1 << 16;

BitString eval_term(const RlTerm& t, const Environment& env);

// 0/1 truth value: connectives as min/max, quantifiers enumerate their range
int eval_standard(const RlFormula& f, const Environment& env, const OracleIface& eta,
                  long long quant_cap = kDefaultQuantCap);

// the event over oracle space denoted by f, as a finite cylinder set
CylinderSet eval_measure(const RlFormula& f, const Environment& env,
                         int coord_cap = kDefaultCoordCap,
                         long long quant_cap = kDefaultQuantCap);

enum class RlClass { Sigma_b_0, Sigma_b_1, ExtendedSigma_b_1, Other };
std::string rl_class_name(RlClass c);
RlClass classify(const RlFormula& f);

// defining formula for a recursion-free function: inputs x1..xn, output y
RlFormulaPtr build_repr_formula(const PorFn& f);

struct ReprReport {
  bool pass = true;
  long long cases_checked = 0;
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
};

// checks, over all inputs and outputs up to max_len and all oracle assignments
// on the relevant coordinates: (a) the formula determines exactly one output,
// (b) it holds exactly at the function value, (c) its measure at each output
// equals that output's probability
ReprReport check_representability(const RlFormula& F, const PorFn& f, int max_len,
                                  long long fuel = kDefaultFuel,
                                  int coord_cap = kDefaultCoordCap);

RlTermPtr rl_parse_term(const std::string& src);
RlFormulaPtr rl_parse_formula(const std::string& src);
std::string rl_show_term(const RlTerm& t);
std::string rl_show(const RlFormula& f);

}  // namespace porlab
