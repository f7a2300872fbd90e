#pragma once

#include <complex>
#include <string>
#include <vector>

#include "hartogs/rational.hpp"

namespace hartogs {

using cd = std::complex<double>;

enum class Var { V1, V2, V1Bar, V2Bar };

// Laurent monomial coeff * v1^a * v2^b * conj(v1)^c * conj(v2)^d with exact
// Gaussian-rational coefficient. Exponents may be negative.
struct Monomial {
  GaussianRational coeff{};
  int a = 0;  // v1
  int b = 0;  // v2
  int c = 0;  // conj v1
  int d = 0;  // conj v2

  bool same_exponents(const Monomial& o) const {
    return a == o.a && b == o.b && c == o.c && d == o.d;
  }
};

struct ExponentBounds {
  int lo1 = 0, hi1 = 0, lo2 = 0, hi2 = 0;
  void include(const Monomial& m);
  void merge(const ExponentBounds& o);
};

// Power tables for one evaluation point; shared across many compiled
// functions evaluated at the same node.
struct PowerTables {
  std::vector<cd> t1, t2;
  int lo1 = 0, lo2 = 0;

  void build(cd v1, cd v2, const ExponentBounds& bounds);
  cd p1(int e) const { return t1[static_cast<std::size_t>(e - lo1)]; }
  cd p2(int e) const { return t2[static_cast<std::size_t>(e - lo2)]; }
};

// Finite sum of monomials, kept normalized: like exponents merged, zero
// coefficients dropped, terms sorted. Two equal functions compare equal
// term-by-term.
class SymbolicFunction {
public:
  SymbolicFunction() = default;
  explicit SymbolicFunction(std::vector<Monomial> terms);

  static SymbolicFunction zero() { return SymbolicFunction(); }
  static SymbolicFunction constant(GaussianRational c);
  static SymbolicFunction monomial(GaussianRational coeff, int a, int b, int c, int d);

  const std::vector<Monomial>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool uses_slot1() const;

  SymbolicFunction derivative(Var v) const;
  SymbolicFunction conjugate() const;
  SymbolicFunction scaled(const GaussianRational& c) const;

  // Substitute v1 -> w1*w2, v2 -> w2 (the map Psi), exactly.
  SymbolicFunction compose_psi() const;

  GaussianRational eval_exact(const GaussianRational& v1, const GaussianRational& v2) const;
  cd eval(cd v1, cd v2) const;

  ExponentBounds bounds() const;

  std::string to_string() const;

  friend SymbolicFunction operator+(const SymbolicFunction& f, const SymbolicFunction& g);
  friend SymbolicFunction operator-(const SymbolicFunction& f, const SymbolicFunction& g);
  friend SymbolicFunction operator*(const SymbolicFunction& f, const SymbolicFunction& g);
  friend bool operator==(const SymbolicFunction& f, const SymbolicFunction& g) {
    return f.terms_.size() == g.terms_.size() &&
           [&] {
             for (std::size_t i = 0; i < f.terms_.size(); ++i) {
               if (!f.terms_[i].same_exponents(g.terms_[i]) ||
                   f.terms_[i].coeff != g.terms_[i].coeff)
                 return false;
             }
             return true;
           }();
  }

private:
  void normalize();
  std::vector<Monomial> terms_;
};

// Double-precision view of a SymbolicFunction for hot quadrature loops.
struct CompiledFunction {
  struct Entry {
    cd coeff;
    int a, b, c, d;
  };
  std::vector<Entry> entries;
  ExponentBounds bounds;

  static CompiledFunction from(const SymbolicFunction& f);

  cd eval(const PowerTables& t) const {
    cd acc = 0;
    for (const Entry& e : entries)
      acc += e.coeff * t.p1(e.a) * t.p2(e.b) * std::conj(t.p1(e.c) * t.p2(e.d));
    return acc;
  }
};

}  // namespace hartogs
