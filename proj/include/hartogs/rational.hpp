#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <cstdint>
#include <string>

#include "hartogs/errors.hpp"

namespace hartogs {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& q) { return q.template convert_to<double>(); }

inline Rat rat_abs(const Rat& q) { return q < 0 ? Rat(-q) : q; }

// q^n for n in Z; n < 0 requires q != 0.
Rat rat_pow(const Rat& q, int n);

// Parse "n", "n/d", with optional sign; throws ConfigError with context.
Rat parse_rat(const std::string& text);

std::string rat_to_string(const Rat& q);

// Element of Q(i). std::complex over a non-floating type is UB, so the
// complex layer is explicit.
struct GaussianRational {
  Rat re{0};
  Rat im{0};

  GaussianRational() = default;
  GaussianRational(Rat r) : re(std::move(r)) {}  // NOLINT: implicit by design
  GaussianRational(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}
  GaussianRational(long r) : re(r) {}  // NOLINT

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }

  GaussianRational conj() const { return {re, -im}; }
  Rat norm_sq() const { return re * re + im * im; }

  // |re| + |im|: exact upper bound for the modulus, exact modulus when real
  // or purely imaginary.
  Rat magnitude_bound() const { return rat_abs(re) + rat_abs(im); }

  std::complex<double> to_complex() const { return {to_double(re), to_double(im)}; }

  friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }
  friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussianRational& a, const GaussianRational& b) {
    return !(a == b);
  }

  GaussianRational& operator+=(const GaussianRational& o) { return *this = *this + o; }
  GaussianRational& operator-=(const GaussianRational& o) { return *this = *this - o; }
  GaussianRational& operator*=(const GaussianRational& o) { return *this = *this * o; }
};

GaussianRational operator/(const GaussianRational& a, const GaussianRational& b);

// z^n for n in Z; n < 0 requires z != 0.
GaussianRational gr_pow(const GaussianRational& z, int n);

inline GaussianRational gr_i() { return {Rat(0), Rat(1)}; }

std::string gr_to_string(const GaussianRational& z);

// An exact value q * pi^pi_power.
struct ExactScalar {
  Rat q{0};
  int pi_power = 0;

  double to_double() const;
  bool is_zero() const { return q == 0; }

  friend ExactScalar operator*(const ExactScalar& a, const ExactScalar& b) {
    return {a.q * b.q, a.pi_power + b.pi_power};
  }
};

// An exact value q * pi^pi_power with q in Q(i).
struct ExactComplex {
  GaussianRational q{};
  int pi_power = 0;

  std::complex<double> to_complex() const;
  bool is_zero() const { return q.is_zero(); }
};

ExactComplex ec_mul(const ExactComplex& a, const ExactComplex& b);
ExactComplex ec_div(const ExactComplex& a, const ExactComplex& b);

// Exact addition; requires matching pi_power unless one side is zero.
ExactComplex ec_add(const ExactComplex& a, const ExactComplex& b);

}  // namespace hartogs
