#pragma once

#include <string>
#include <utility>
#include <vector>

#include "porlab/por.hpp"
#include "porlab/sifp.hpp"
#include "porlab/stm.hpp"

namespace porlab {

// Compilation passes chaining the models: function algebra -> flip programs ->
// stream programs -> multi-tape on-demand machines -> encoded machines ->
// paired-table machines. Every pass preserves the output distribution exactly.

// Compile an algebra function to a flip program: arguments are read from
// X1..Xn, the result lands in R, input registers are never assigned, and the
// reserved table register T is never referenced.
SStmtPtr por_to_sifpra(const PorFn& f);

// Query-table codec: each payload bit b becomes the pair 1b, key and value
// are separated by 01, every entry ends with 00. Prefix-decodable, so the
// in-language bit-scan idioms can traverse it.
BitString encode_kv_list(const std::vector<std::pair<BitString, int>>& entries);
std::vector<std::pair<BitString, int>> decode_kv_list(const BitString& s);

// Replace every flip with a lookup-or-draw gadget over the reserved table
// register T: a repeated coordinate replays the recorded bit, a fresh one
// draws randbit() and appends the entry to T. Rejects programs that already
// use T.
SStmtPtr sifpra_to_sifpla(const SifpStmt& p);

// A machine compiled from a stream program: one tape per register plus one
// expression scratch tape (named "e", not a register). Between statement
// gadgets every head is parked on the blank cell just left of its value.
struct OdMachine {
  StmSpec spec;
  std::vector<std::string> tapes;  // tape index -> register name; tape 0 is R
  int input_arity = 0;             // highest Xi the source program reads
};

inline constexpr int kOdStateCap = 1 << 20;
inline constexpr int kOdTapeCap = 64;

OdMachine sifpla_to_odstm(const SifpStmt& p);

// start configurations with the given values in X1..Xn and all else empty
StmConfig od_init(const OdMachine& m, const std::vector<BitString>& inputs,
                  BitStream stream = {});
StmConfig od_init(const StmSpec& spec, const std::vector<std::string>& tapes,
                  const std::vector<BitString>& inputs, BitStream stream = {});
PtmConfig od_init_ptm(const PtmSpec& spec, const std::vector<std::string>& tapes,
                      const std::vector<BitString>& inputs);

struct PipelineBundle {
  PorPtr source;
  SStmtPtr stage_ra;
  SStmtPtr stage_la;
  OdMachine stage_od;
  StmSpec stage_stm;  // h_encode(stage_od.spec)
  PtmSpec stage_ptm;  // stm_to_ptm(stage_stm)
  std::vector<std::string> provenance;
};

PipelineBundle build_pipeline(PorPtr f);

// one "<stage> <digest>" line per stage, for regression pinning
std::string pipeline_manifest(const PipelineBundle& b);

}  // namespace porlab
