#include "porlab/oracle.hpp"

#include <algorithm>

namespace porlab {

int Oracle::query(const BitString& coord) const {
  auto it = table.find(coord);
  if (it != table.end()) return it->second;
  switch (policy) {
    case OraclePolicy::Zero: return 0;
    case OraclePolicy::One: return 1;
    default: throw OracleMiss(coord);
  }
}

int PartialOracle::query(const BitString& coord) const {
  auto it = bits->find(coord);
  if (it == bits->end()) throw NeedCoord{coord};
  return it->second;
}

int BitStream::take() {
  if (cursor < prefix.size()) return prefix[cursor++] - '0';
  if (symbolic) throw NeedStreamBit{};
  throw StreamUnderrun{};
}

CylinderSet CylinderSet::full() {
  CylinderSet c;
  c.members.insert(std::vector<int>{});
  return c;
}

CylinderSet CylinderSet::none() { return CylinderSet{}; }

CylinderSet CylinderSet::flip(const BitString& coord, int bit) {
  CylinderSet c;
  c.coords = {coord};
  c.members.insert(std::vector<int>{bit});
  return c;
}

Dyadic cylinder_measure(const CylinderSet& c) {
  return Dyadic::ratio(mpz_class(static_cast<unsigned long>(c.members.size())),
                       c.coords.size());
}

CylinderSet cyl_extend(const CylinderSet& c, const std::vector<BitString>& coords,
                       int coord_cap) {
  std::vector<BitString> merged = c.coords;
  merged.insert(merged.end(), coords.begin(), coords.end());
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  if (merged == c.coords) return c;
  if (static_cast<int>(merged.size()) > coord_cap)
    throw std::runtime_error("cylinder coordinate cap exceeded");

  // position of each old coordinate in the merged list, -1 for fresh ones
  std::vector<int> at(merged.size(), -1);
  for (size_t i = 0; i < merged.size(); ++i) {
    auto it = std::lower_bound(c.coords.begin(), c.coords.end(), merged[i]);
    if (it != c.coords.end() && *it == merged[i]) at[i] = int(it - c.coords.begin());
  }

  CylinderSet out;
  out.coords = merged;
  size_t fresh = 0;
  for (int p : at)
    if (p < 0) ++fresh;
  for (const auto& m : c.members) {
    for (size_t mask = 0; mask < (size_t(1) << fresh); ++mask) {
      std::vector<int> row(merged.size());
      size_t bit = 0;
      for (size_t i = 0; i < merged.size(); ++i)
        row[i] = at[i] >= 0 ? m[at[i]] : int((mask >> bit++) & 1);
      out.members.insert(std::move(row));
    }
  }
  return out;
}

CylinderSet cyl_union(const CylinderSet& a, const CylinderSet& b, int coord_cap) {
  CylinderSet ea = cyl_extend(a, b.coords, coord_cap);
  CylinderSet eb = cyl_extend(b, a.coords, coord_cap);
  for (const auto& m : eb.members) ea.members.insert(m);
  return ea;
}

CylinderSet cyl_intersect(const CylinderSet& a, const CylinderSet& b, int coord_cap) {
  CylinderSet ea = cyl_extend(a, b.coords, coord_cap);
  CylinderSet eb = cyl_extend(b, a.coords, coord_cap);
  CylinderSet out;
  out.coords = ea.coords;
  for (const auto& m : ea.members)
    if (eb.members.count(m)) out.members.insert(m);
  return out;
}

CylinderSet cyl_complement(const CylinderSet& a) {
  CylinderSet out;
  out.coords = a.coords;
  std::vector<int> row(a.coords.size(), 0);
  size_t n = a.coords.size();
  for (size_t mask = 0; mask < (size_t(1) << n); ++mask) {
    for (size_t i = 0; i < n; ++i) row[i] = int((mask >> i) & 1);
    if (!a.members.count(row)) out.members.insert(row);
  }
  return out;
}

CylinderSet cyl_difference(const CylinderSet& a, const CylinderSet& b, int coord_cap) {
  CylinderSet ea = cyl_extend(a, b.coords, coord_cap);
  CylinderSet eb = cyl_extend(b, a.coords, coord_cap);
  CylinderSet out;
  out.coords = ea.coords;
  for (const auto& m : ea.members)
    if (!eb.members.count(m)) out.members.insert(m);
  return out;
}

bool cyl_subset(const CylinderSet& a, const CylinderSet& b, int coord_cap) {
  CylinderSet ea = cyl_extend(a, b.coords, coord_cap);
  CylinderSet eb = cyl_extend(b, a.coords, coord_cap);
  for (const auto& m : ea.members)
    if (!eb.members.count(m)) return false;
  return true;
}

bool cyl_member(const CylinderSet& c, const OracleIface& eta) {
  std::vector<int> row;
  row.reserve(c.coords.size());
  for (const auto& k : c.coords) row.push_back(eta.query(k));
  return c.members.count(row) != 0;
}

BitString extractor_e(const BitString& x, const OracleIface& eta) {
  BitString acc;
  for (size_t i = 1; i <= x.size(); ++i) {
    BitString prefix = x.substr(0, i);
    acc = truncate(acc + char('0' + eta.query(dy(prefix))), prefix);
  }
  return acc;
}

}  // namespace porlab
