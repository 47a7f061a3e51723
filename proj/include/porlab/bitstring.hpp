#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace porlab {

// Binary words over {0,1}: chars '0'/'1', leftmost bit first, "" is the empty
// word eps. Value semantics, structural equality.
using BitString = std::string;

// x followed by y
BitString concat(const BitString& x, const BitString& y);

// x repeated |y| times
BitString times(const BitString& x, const BitString& y);

// t|_r : initial subword of t of length min(|t|,|r|)
BitString truncate(const BitString& t, const BitString& r);

// x is a prefix of y
bool is_initial_subword(const BitString& x, const BitString& y);

// x occurs contiguously in y
bool is_subword(const BitString& x, const BitString& y);

// binsucc(eps) := 1 ; binsucc(x0) := x1|_{x00} ; binsucc(x1) := binsucc(x)0|_{x00}
BitString binsucc(const BitString& x);

// bin(eps) := 0 ; bin(xb) := binsucc(bin(x))|_{xb}
BitString bin_of(const BitString& x);

// drop the leftmost bit, eps if there is none
BitString lrs(const BitString& x);

// dy(x) := lrs(bin(x))
BitString dy(const BitString& x);

// binary numeral of n+1 with its leading bit stripped; a bijection N -> words
BitString dyad(uint64_t n);

// literal syntax used everywhere: "eps" for the empty word, else a digit run
BitString parse_bits(const std::string& lit);
std::string show_bits(const BitString& x);

// eps first, then by length, lexicographic within a length
std::vector<BitString> all_strings_upto(int max_len);

}  // namespace porlab
