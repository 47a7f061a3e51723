#pragma once

#include <gmpxx.h>

#include <map>
#include <string>

#include "porlab/bitstring.hpp"

namespace porlab {

// Exact dyadic rational num / 2^log2den, canonical: num odd, or num = 0 with
// log2den = 0. Arbitrary precision, no rounding anywhere.
struct Dyadic {
  mpz_class num;
  unsigned long log2den = 0;

  Dyadic() = default;
  Dyadic(long n) : num(n) {}
  static Dyadic ratio(mpz_class n, unsigned long d);
  static Dyadic pow2(unsigned long k);  // 1 / 2^k

  bool is_zero() const { return num == 0; }
};

Dyadic operator+(const Dyadic& a, const Dyadic& b);
Dyadic operator-(const Dyadic& a, const Dyadic& b);
Dyadic operator*(const Dyadic& a, const Dyadic& b);
bool operator==(const Dyadic& a, const Dyadic& b);
bool operator!=(const Dyadic& a, const Dyadic& b);
bool operator<(const Dyadic& a, const Dyadic& b);
Dyadic halve(const Dyadic& a);
Dyadic dyadic_abs(const Dyadic& a);
std::string to_string(const Dyadic& a);

// Exact output distribution over words plus explicit mass for runs cut off by
// the fuel bound; on total runs weights + diverge = 1.
struct Distribution {
  std::map<BitString, Dyadic> weights;
  Dyadic diverge;

  void add(const BitString& v, const Dyadic& w);
  void add_diverge(const Dyadic& w);
  Dyadic total() const;
  bool total_is_one() const { return total() == Dyadic(1); }
};

bool dist_equal(const Distribution& a, const Distribution& b);

// serialization: {"<bit literal>": {"num": "...", "log2den": n}, ...,
// "diverge": {...}}, keys sorted; plus a human-readable table
std::string dist_json(const Distribution& d);
std::string dist_table(const Distribution& d);

}  // namespace porlab
