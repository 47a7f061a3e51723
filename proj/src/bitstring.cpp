#include "porlab/bitstring.hpp"

namespace porlab {

BitString concat(const BitString& x, const BitString& y) { return x + y; }

BitString times(const BitString& x, const BitString& y) {
  BitString out;
  out.reserve(x.size() * y.size());
  for (size_t i = 0; i < y.size(); ++i) out += x;
  return out;
}

BitString truncate(const BitString& t, const BitString& r) {
  if (t.size() <= r.size()) return t;
  return t.substr(0, r.size());
}

bool is_initial_subword(const BitString& x, const BitString& y) {
  return x.size() <= y.size() && y.compare(0, x.size(), x) == 0;
}

bool is_subword(const BitString& x, const BitString& y) {
  return y.find(x) != BitString::npos;
}

BitString binsucc(const BitString& x) {
  if (x.empty()) return "1";
  BitString head = x.substr(0, x.size() - 1);
  BitString bound = head + "00";
  if (x.back() == '0') return truncate(head + "1", bound);
  return truncate(binsucc(head) + "0", bound);
}

BitString bin_of(const BitString& x) {
  BitString acc = "0";
  for (size_t i = 0; i < x.size(); ++i) acc = truncate(binsucc(acc), x.substr(0, i + 1));
  return acc;
}

BitString lrs(const BitString& x) { return x.empty() ? BitString() : x.substr(1); }

BitString dy(const BitString& x) { return lrs(bin_of(x)); }

BitString dyad(uint64_t n) {
  uint64_t m = n + 1;
  BitString out;
  for (; m > 0; m >>= 1) out.insert(out.begin(), char('0' + (m & 1)));
  return out.substr(1);
}

BitString parse_bits(const std::string& lit) {
  if (lit == "eps") return {};
  if (lit.empty()) throw std::invalid_argument("empty bit literal (use eps)");
  for (char c : lit)
    if (c != '0' && c != '1') throw std::invalid_argument("bad bit literal: " + lit);
  return lit;
}

std::string show_bits(const BitString& x) { return x.empty() ? "eps" : x; }

std::vector<BitString> all_strings_upto(int max_len) {
  std::vector<BitString> out{BitString()};
  size_t first = 0;
  for (int len = 1; len <= max_len; ++len) {
    size_t last = out.size();
    for (size_t i = first; i < last; ++i) {
      out.push_back(out[i] + "0");
      out.push_back(out[i] + "1");
    }
    first = last;
  }
  return out;
}

}  // namespace porlab
