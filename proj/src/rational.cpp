#include "hartogs/rational.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

namespace hartogs {

Rat rat_pow(const Rat& q, int n) {
  if (n == 0) return Rat(1);
  if (n < 0) {
    if (q == 0) throw SingularPointError("rat_pow: 0 raised to negative power");
    return rat_pow(Rat(1) / q, -n);
  }
  Rat base = q, acc = 1;
  int e = n;
  while (e > 0) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

Rat parse_rat(const std::string& text) {
  auto bad = [&](const char* why) {
    throw ConfigError("invalid rational '" + text + "': " + why);
  };
  std::size_t i = 0, n = text.size();
  auto read_int = [&](const char* what) -> BigInt {
    std::size_t start = i;
    if (i < n && (text[i] == '+' || text[i] == '-')) ++i;
    std::size_t digits = i;
    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i == digits) bad(what);
    return BigInt(text.substr(start, i - start));
  };
  if (n == 0) bad("empty");
  BigInt num = read_int("missing numerator");
  if (i == n) return Rat(num);
  if (text[i] != '/') bad("expected '/'");
  ++i;
  BigInt den = read_int("missing denominator");
  if (i != n) bad("trailing characters");
  if (den == 0) bad("zero denominator");
  return Rat(num, den);
}

std::string rat_to_string(const Rat& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
  Rat n = b.norm_sq();
  if (n == 0) throw SingularPointError("GaussianRational: division by zero");
  GaussianRational prod = a * b.conj();
  return {prod.re / n, prod.im / n};
}

GaussianRational gr_pow(const GaussianRational& z, int n) {
  if (n == 0) return GaussianRational(Rat(1));
  if (n < 0) {
    if (z.is_zero()) throw SingularPointError("gr_pow: 0 raised to negative power");
    return gr_pow(GaussianRational(Rat(1)) / z, -n);
  }
  GaussianRational base = z, acc{Rat(1)};
  int e = n;
  while (e > 0) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

std::string gr_to_string(const GaussianRational& z) {
  if (z.im == 0) return rat_to_string(z.re);
  std::string s = rat_to_string(z.re);
  s += (z.im < 0) ? " - " : " + ";
  s += rat_to_string(rat_abs(z.im)) + "*i";
  return s;
}

double ExactScalar::to_double() const {
  return hartogs::to_double(q) * std::pow(std::numbers::pi, pi_power);
}

std::complex<double> ExactComplex::to_complex() const {
  double scale = std::pow(std::numbers::pi, pi_power);
  return {hartogs::to_double(q.re) * scale, hartogs::to_double(q.im) * scale};
}

ExactComplex ec_mul(const ExactComplex& a, const ExactComplex& b) {
  return {a.q * b.q, a.pi_power + b.pi_power};
}

ExactComplex ec_div(const ExactComplex& a, const ExactComplex& b) {
  return {a.q / b.q, a.pi_power - b.pi_power};
}

ExactComplex ec_add(const ExactComplex& a, const ExactComplex& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.pi_power != b.pi_power)
    throw SingularPointError("ExactComplex: sum of incompatible pi powers");
  return {a.q + b.q, a.pi_power};
}

}  // namespace hartogs
