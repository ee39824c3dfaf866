#include "mwvc/exact.hpp"

#include <cctype>
#include <stdexcept>

namespace mwvc {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

bool is_fraction(const Rat& g) { return g > 0 && g < 1; }

}  // namespace

Rat rat_pow(const Rat& base, unsigned long exp) {
  using boost::multiprecision::pow;
  if (exp == 0) return Rat(1);
  // numerator and denominator are coprime, so their powers are too; the
  // two-argument constructor keeps canonical form without a gcd pass.
  Int n = pow(numerator(base), static_cast<unsigned>(exp));
  Int d = pow(denominator(base), static_cast<unsigned>(exp));
  return Rat(n, d);
}

long floor_log(const Rat& gamma, const Rat& x) {
  require(is_fraction(gamma), "floor_log: gamma must lie in (0,1)");
  require(x > 0 && x <= 1, "floor_log: x must lie in (0,1]");
  long k = 0;
  Rat p = gamma;  // p == gamma^(k+1)
  while (p >= x) {
    ++k;
    p *= gamma;
  }
  return k;
}

long ceil_log(const Rat& gamma, const Rat& x) {
  require(is_fraction(gamma), "ceil_log: gamma must lie in (0,1)");
  require(x > 0 && x < 1, "ceil_log: x must lie in (0,1)");
  long k = 1;
  Rat p = gamma;  // p == gamma^k
  while (p > x) {
    ++k;
    p *= gamma;
  }
  return k;
}

long ceil_log_up(const Rat& base, const Rat& x) {
  require(base > 1, "ceil_log_up: base must exceed 1");
  require(x >= 1, "ceil_log_up: x must be at least 1");
  long k = 0;
  Rat p = 1;  // p == base^k
  while (p < x) {
    ++k;
    p *= base;
  }
  return k;
}

Int isqrt(const Int& n) {
  require(n >= 0, "isqrt: negative argument");
  return boost::multiprecision::sqrt(n);
}

Int iroot(const Int& n, unsigned m) {
  require(m >= 1, "iroot: zeroth root");
  require(n >= 0, "iroot: negative argument");
  if (m == 1 || n <= 1) return n;
  if (m == 2) return isqrt(n);
  using boost::multiprecision::pow;
  Int lo = 0;
  Int hi = Int(1) << (bit_length(n) / m + 1);
  while (lo < hi) {
    Int mid = (lo + hi + 1) >> 1;
    if (pow(mid, m) <= n)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

unsigned floor_log2(const Int& v) {
  require(v >= 1, "floor_log2: argument must be positive");
  return static_cast<unsigned>(boost::multiprecision::msb(v));
}

Int ceil_rat(const Rat& r) {
  Int n = numerator(r), d = denominator(r);
  if (n >= 0) return (n + d - 1) / d;
  return n / d;  // truncation == ceiling for negatives
}

unsigned bit_length(const Int& v) {
  if (v == 0) return 1;
  return floor_log2(abs(v)) + 1;
}

unsigned rat_bits(const Rat& r) {
  return bit_length(numerator(r)) + bit_length(denominator(r));
}

Rat inv_sqrt_log_approx(const Int& delta) {
  require(delta > 16, "inv_sqrt_log_approx: delta must exceed 16");
  Int log2d(floor_log2(delta));
  Int radicand = (Int(1) << 60) / log2d;
  Int s = isqrt(radicand);  // == floor(2^30 / sqrt(log2d))
  require(s >= 1, "inv_sqrt_log_approx: underflow");
  Rat g(s, Int(1) << 30);
  if (g > Rat(1, 2)) g = Rat(1, 2);
  return g;
}

Rat eps_power_gamma(const Rat& epsilon, int q) {
  require(epsilon > 0, "eps_power_gamma: epsilon must be positive");
  require(q >= 1, "eps_power_gamma: q must be at least 1");
  unsigned m = 2 * static_cast<unsigned>(q);
  // floor(2^30 * eps^(1/m)) == floor((eps * 2^(30m))^(1/m)); the inner floor
  // before the root does not change the result because the bracketing
  // integer powers are unaffected.
  Int scaled = (numerator(epsilon) << (30 * m)) / denominator(epsilon);
  Int r = iroot(scaled, m);
  Int grid = Int(1) << 30;
  Int half = grid >> 1;
  if (r < 1) r = 1;
  if (r > half) r = half;
  return Rat(r, grid);
}

std::string to_frac_string(const Rat& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

namespace {

Int parse_digits(std::string_view s, const char* ctx) {
  if (s.empty()) throw std::invalid_argument(std::string(ctx) + ": missing digits");
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw std::invalid_argument(std::string(ctx) + ": bad digit in '" + std::string(s) + "'");
  return Int(std::string(s));
}

}  // namespace

Rat parse_rat(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw std::invalid_argument("parse_rat: empty input");

  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }

  Rat value;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Int num = parse_digits(s.substr(0, slash), "parse_rat numerator");
    Int den = parse_digits(s.substr(slash + 1), "parse_rat denominator");
    if (den == 0) throw std::invalid_argument("parse_rat: zero denominator");
    value = Rat(num, den);
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    Int whole = parse_digits(s.substr(0, dot), "parse_rat integer part");
    std::string_view frac = s.substr(dot + 1);
    Int fpart = parse_digits(frac, "parse_rat fractional part");
    Int scale = 1;
    for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
    value = Rat(whole * scale + fpart, scale);
  } else {
    value = Rat(parse_digits(s, "parse_rat"));
  }
  return negative ? Rat(-value) : value;
}

}  // namespace mwvc
