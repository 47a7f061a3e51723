#pragma once

#include <map>
#include <string>
#include <vector>

#include "porlab/bitstring.hpp"
#include "porlab/dyadic.hpp"
#include "porlab/oracle.hpp"

namespace porlab {

// Machines over bit tapes fed by a stream of random bits. A stream machine
// consumes one stream bit per step; the on-demand variant may tag transitions
// with ~ to step without consuming. A pair machine carries two transition
// tables instead and picks one with each drawn bit.

inline constexpr char kBlank = '_';

// oracle tag of a transition: consume a 0, consume a 1, or do not consume
enum class OdTag : char { Bit0 = '0', Bit1 = '1', Skip = '~' };

struct StmTrans {
  int state = 0;
  std::string reads;  // one symbol per tape
  OdTag tag = OdTag::Skip;
  std::string writes;
  std::string moves;  // per tape: L, R, or S
  int next = 0;

  bool operator==(const StmTrans&) const = default;
  auto operator<=>(const StmTrans&) const = default;
};

struct StmSpec {
  int states = 1;
  int initial = 0;
  int tapes = 1;
  std::vector<StmTrans> table;  // canonically sorted, keyed by (state, reads, tag)

  bool operator==(const StmSpec&) const = default;
};

// validates and canonicalizes; throws on malformed tables
StmSpec stm_make(int states, int initial, int tapes, std::vector<StmTrans> table);

// true when every transition consumes a stream bit (no ~ tags)
bool stm_standard(const StmSpec& m);

struct Tape {
  std::string left;   // symbols left of the head, leftmost first
  std::string right;  // head symbol first, then rightward; empty reads blank

  bool operator==(const Tape&) const = default;
};

struct StmConfig {
  int state = 0;
  std::vector<Tape> tapes;
  BitStream stream;
};

StmConfig stm_init(const StmSpec& m, const BitString& input, BitStream stream = {});
StmConfig stm_init_tapes(const StmSpec& m, const std::vector<BitString>& contents,
                         BitStream stream = {});

// longest blank-free suffix of the content left of the head
BitString output_extract(const Tape& t);
BitString output_extract(const StmConfig& c);  // tape 0

// one step attempt: Moved applied a transition, Blocked peeked a bit with no
// matching transition (nothing consumed), Final had no candidate at all
enum class StepKind { Moved, Blocked, Final };
StepKind stm_step(const StmSpec& m, StmConfig& c);

// iterate to a final or blocked configuration, then extract the output
BitString run(const StmSpec& m, StmConfig& c, long long fuel = kDefaultFuel);
BitString run(const StmSpec& m, const BitString& input, BitStream stream,
              long long fuel = kDefaultFuel);

// exact output distribution computed on a weighted frontier of configurations
// advanced level by level, merging duplicates; consuming steps split mass in
// half per bit, so all weights stay dyadic; cap bounds the frontier width
inline constexpr int kDefaultFrontierCap = 1 << 14;

Distribution run_dist(const StmSpec& m, const StmConfig& start, long long fuel = kDefaultFuel,
                      int cap = kDefaultFrontierCap);
Distribution run_dist(const StmSpec& m, const BitString& input, long long fuel = kDefaultFuel,
                      int cap = kDefaultFrontierCap);

// replace each non-consuming transition by a 0-consuming and a 1-consuming copy
StmSpec h_encode(const StmSpec& m);

struct PtmTrans {
  int state = 0;
  std::string reads;
  std::string writes;
  std::string moves;
  int next = 0;

  bool operator==(const PtmTrans&) const = default;
  auto operator<=>(const PtmTrans&) const = default;
};

struct PtmSpec {
  int states = 1;
  int initial = 0;
  int tapes = 1;
  std::vector<PtmTrans> delta0, delta1;  // picked by the drawn bit

  bool operator==(const PtmSpec&) const = default;
};

PtmSpec ptm_make(int states, int initial, int tapes, std::vector<PtmTrans> delta0,
                 std::vector<PtmTrans> delta1);

// mutually inverse table splits; stm_to_ptm requires a standard machine
PtmSpec stm_to_ptm(const StmSpec& m);
StmSpec ptm_to_stm(const PtmSpec& p);

struct PtmConfig {
  int state = 0;
  std::vector<Tape> tapes;
};

PtmConfig ptm_init(const PtmSpec& m, const BitString& input);
PtmConfig ptm_init_tapes(const PtmSpec& m, const std::vector<BitString>& contents);

// no transition in either table for the current (state, reads)
bool ptm_final(const PtmSpec& m, const PtmConfig& c);

// apply the drawn bit's transition if defined; otherwise stay in place
bool ptm_step(const PtmSpec& m, PtmConfig& c, int bit);

// each step draws a bit; an undefined transition for that bit stays in place
BitString run(const PtmSpec& m, PtmConfig c, BitStream stream, long long fuel = kDefaultFuel);

Distribution run_dist(const PtmSpec& m, const PtmConfig& start, long long fuel = kDefaultFuel,
                      int cap = kDefaultFrontierCap);
Distribution run_dist(const PtmSpec& m, const BitString& input, long long fuel = kDefaultFuel,
                      int cap = kDefaultFrontierCap);

// canonical text key for a configuration, stream disregarded
std::string config_key(int state, const std::vector<Tape>& tapes);
inline std::string config_key(const StmConfig& c) { return config_key(c.state, c.tapes); }
inline std::string config_key(const PtmConfig& c) { return config_key(c.state, c.tapes); }

// measure of the streams reaching each configuration in exactly n steps;
// paths that halt or block earlier contribute nothing
std::map<std::string, Dyadic> reach_measures(const StmSpec& m, const StmConfig& start, int n);

StmSpec stm_parse(const std::string& src);
std::string stm_show(const StmSpec& m);
PtmSpec ptm_parse(const std::string& src);
std::string ptm_show(const PtmSpec& m);

}  // namespace porlab
