#include "porlab/dyadic.hpp"

#include <sstream>

#include "json.hpp"

namespace porlab {

Dyadic Dyadic::ratio(mpz_class n, unsigned long d) {
  while (d > 0 && n != 0 && mpz_even_p(n.get_mpz_t())) {
    n >>= 1;
    --d;
  }
  if (n == 0) d = 0;
  Dyadic out;
  out.num = std::move(n);
  out.log2den = d;
  return out;
}

Dyadic Dyadic::pow2(unsigned long k) { return ratio(1, k); }

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
  unsigned long d = std::max(a.log2den, b.log2den);
  mpz_class n = (a.num << (d - a.log2den)) + (b.num << (d - b.log2den));
  return Dyadic::ratio(std::move(n), d);
}

Dyadic operator-(const Dyadic& a, const Dyadic& b) {
  unsigned long d = std::max(a.log2den, b.log2den);
  mpz_class n = (a.num << (d - a.log2den)) - (b.num << (d - b.log2den));
  return Dyadic::ratio(std::move(n), d);
}

Dyadic operator*(const Dyadic& a, const Dyadic& b) {
  return Dyadic::ratio(a.num * b.num, a.log2den + b.log2den);
}

bool operator==(const Dyadic& a, const Dyadic& b) {
  return a.log2den == b.log2den && a.num == b.num;
}

bool operator!=(const Dyadic& a, const Dyadic& b) { return !(a == b); }

bool operator<(const Dyadic& a, const Dyadic& b) {
  unsigned long d = std::max(a.log2den, b.log2den);
  return (a.num << (d - a.log2den)) < (b.num << (d - b.log2den));
}

Dyadic halve(const Dyadic& a) { return Dyadic::ratio(a.num, a.log2den + 1); }

Dyadic dyadic_abs(const Dyadic& a) {
  Dyadic out = a;
  out.num = abs(out.num);
  return out;
}

std::string to_string(const Dyadic& a) {
  if (a.log2den == 0) return a.num.get_str();
  std::ostringstream os;
  os << a.num.get_str() << "/2^" << a.log2den;
  return os.str();
}

void Distribution::add(const BitString& v, const Dyadic& w) {
  auto it = weights.find(v);
  if (it == weights.end()) {
    weights.emplace(v, w);
  } else {
    it->second = it->second + w;
  }
}

void Distribution::add_diverge(const Dyadic& w) { diverge = diverge + w; }

Dyadic Distribution::total() const {
  Dyadic t = diverge;
  for (const auto& [v, w] : weights) t = t + w;
  return t;
}

bool dist_equal(const Distribution& a, const Distribution& b) {
  if (a.diverge != b.diverge) return false;
  if (a.weights.size() != b.weights.size()) return false;
  auto ia = a.weights.begin();
  auto ib = b.weights.begin();
  for (; ia != a.weights.end(); ++ia, ++ib)
    if (ia->first != ib->first || ia->second != ib->second) return false;
  return true;
}

static nlohmann::json dyadic_json(const Dyadic& a) {
  return {{"num", a.num.get_str()}, {"log2den", a.log2den}};
}

std::string dist_json(const Distribution& d) {
  nlohmann::json j;
  for (const auto& [v, w] : d.weights) j[show_bits(v)] = dyadic_json(w);
  j["diverge"] = dyadic_json(d.diverge);
  return j.dump(2);
}

std::string dist_table(const Distribution& d) {
  std::ostringstream os;
  for (const auto& [v, w] : d.weights) os << show_bits(v) << "\t" << to_string(w) << "\n";
  if (!d.diverge.is_zero()) os << "diverge\t" << to_string(d.diverge) << "\n";
  return os.str();
}

}  // namespace porlab
