#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "porlab/bitstring.hpp"
#include "porlab/dyadic.hpp"

namespace porlab {

struct OracleMiss : std::runtime_error {
  explicit OracleMiss(const BitString& c)
      : std::runtime_error("oracle miss at coordinate " + show_bits(c)) {}
};
struct StreamUnderrun : std::runtime_error {
  StreamUnderrun() : std::runtime_error("bit stream exhausted") {}
};
struct FuelExhausted : std::runtime_error {
  FuelExhausted() : std::runtime_error("fuel exhausted") {}
};

// control-flow signals for the exact-distribution branch drivers
struct NeedCoord {
  BitString coord;
};
struct NeedStreamBit {};

struct OracleIface {
  virtual int query(const BitString& coord) const = 0;
  virtual ~OracleIface() = default;
};

enum class OraclePolicy { Strict, Zero, One };

// eta in B^S as a finite table with a policy for unlisted coordinates
struct Oracle : OracleIface {
  std::map<BitString, int> table;
  OraclePolicy policy = OraclePolicy::Strict;

  Oracle() = default;
  explicit Oracle(std::map<BitString, int> t, OraclePolicy p = OraclePolicy::Strict)
      : table(std::move(t)), policy(p) {}
  int query(const BitString& coord) const override;
};

// resolves from a growing path record, throws NeedCoord on a fresh coordinate
struct PartialOracle : OracleIface {
  const std::map<BitString, int>* bits;
  explicit PartialOracle(const std::map<BitString, int>& b) : bits(&b) {}
  int query(const BitString& coord) const override;
};

/// omega in B^N: a finite prefix consumed left to right; symbolic streams ask
// the branch driver for more, concrete ones underrun
struct BitStream {
  BitString prefix;
  size_t cursor = 0;
  bool symbolic = false;

  int take();
  size_t consumed() const { return cursor; }
};

// set of oracles determined by the assignments H over coordinates K
struct CylinderSet {
  std::vector<BitString> coords;        // sorted, unique
  std::set<std::vector<int>> members;   // each aligned with coords

  static CylinderSet full();
  static CylinderSet none();
  static CylinderSet flip(const BitString& coord, int bit);
};

inline constexpr int kDefaultCoordCap = 20;
inline constexpr long long kDefaultFuel = 1000000;
inline constexpr int kDefaultBranchCap = 24;

// mu_C(C(H)) = |H| / 2^|K|
Dyadic cylinder_measure(const CylinderSet& c);

CylinderSet cyl_extend(const CylinderSet& c, const std::vector<BitString>& coords,
                       int coord_cap = kDefaultCoordCap);
CylinderSet cyl_union(const CylinderSet& a, const CylinderSet& b,
                      int coord_cap = kDefaultCoordCap);
CylinderSet cyl_intersect(const CylinderSet& a, const CylinderSet& b,
                          int coord_cap = kDefaultCoordCap);
CylinderSet cyl_complement(const CylinderSet& a);
CylinderSet cyl_difference(const CylinderSet& a, const CylinderSet& b,
                           int coord_cap = kDefaultCoordCap);
bool cyl_subset(const CylinderSet& a, const CylinderSet& b, int coord_cap = kDefaultCoordCap);

// does eta's restriction to the coordinates belong to the set
bool cyl_member(const CylinderSet& c, const OracleIface& eta);

// e(eps,eta) := eps ; e(xb,eta) := (e(x,eta) ^ eta(dy(xb)))|_{xb}
// bit k (1-based) queries coordinate dyad(k-1)
BitString extractor_e(const BitString& x, const OracleIface& eta);

}  // namespace porlab
