#pragma once

// Exact rational arithmetic used everywhere on the protocol path. Nothing
// here (or anywhere downstream) rounds through floating point: logarithm
// indices are found by iterating exact powers, and the two irrational
// parameter presets are realized as round-down approximations on a fixed
// 2^-30 grid so that every run is reproducible bit for bit.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace mwvc {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// base^exp with exp >= 0, exact. rat_pow(x, 0) == 1 for every x.
Rat rat_pow(const Rat& base, unsigned long exp);

// Unique k >= 0 with gamma^(k+1) < x <= gamma^k.
// Requires 0 < gamma < 1 and 0 < x <= 1. Throws std::domain_error otherwise.
long floor_log(const Rat& gamma, const Rat& x);

// min { k >= 1 : gamma^k <= x }.
// Requires 0 < gamma < 1 and 0 < x < 1. Throws std::domain_error otherwise.
long ceil_log(const Rat& gamma, const Rat& x);

// min { k >= 0 : base^k >= x }.
// Requires base > 1 and x >= 1. Throws std::domain_error otherwise.
long ceil_log_up(const Rat& base, const Rat& x);

// Deterministic stand-in for 1/sqrt(log2(delta)): floor(2^30/sqrt(L))/2^30
// with L = floor(log2(delta)), computed as an integer square root of the
// 2^60-scaled radicand and clamped into (0, 1/2]. Requires delta > 16.
Rat inv_sqrt_log_approx(const Int& delta);

// Deterministic stand-in for epsilon^(1/(2q)): the 2^-30 grid value
// floor(2^30 * epsilon^(1/(2q)))/2^30, clamped into (0, 1/2]. The power rule
// only makes sense for small epsilon; from epsilon >= 2^-2q onward it
// degrades to the 1/2 default (an unclamped value near 1 would make the
// level scale astronomically fine). Requires epsilon > 0 and q >= 1.
Rat eps_power_gamma(const Rat& epsilon, int q);

// floor(sqrt(n)), n >= 0.
Int isqrt(const Int& n);

// floor(n^(1/m)), n >= 0, m >= 1.
Int iroot(const Int& n, unsigned m);

// floor(log2(v)), v >= 1 (index of the most significant bit).
unsigned floor_log2(const Int& v);

// ceil(r) as an integer.
Int ceil_rat(const Rat& r);

// Bits needed to write the magnitude of v; zero takes one bit.
unsigned bit_length(const Int& v);

// Payload cost of a rational message: magnitude bits of numerator plus
// denominator.
unsigned rat_bits(const Rat& r);

// Canonical rendering "num/den"; the denominator is always present and
// positive, e.g. "0/1", "-3/5".
std::string to_frac_string(const Rat& r);

// Accepts "a", "a/b" and decimal "a.b" forms, optionally signed; exact.
// Throws std::invalid_argument on malformed input or zero denominator.
Rat parse_rat(std::string_view text);

}  // namespace mwvc
