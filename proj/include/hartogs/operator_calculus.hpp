#pragma once

#include <map>
#include <string>
#include <vector>

#include "hartogs/multi_index.hpp"
#include "hartogs/rational.hpp"
#include "hartogs/symbolic.hpp"

namespace hartogs {

// Polynomial in one complex variable over Q(i); c[k] multiplies x^k.
class Poly1 {
public:
  Poly1() = default;
  explicit Poly1(std::vector<GaussianRational> coeffs);
  static Poly1 one();

  const std::vector<GaussianRational>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }

  Poly1 derivative() const;
  Poly1 times_x() const;
  Poly1 scaled(const GaussianRational& s) const;
  Poly1 plus(const Poly1& o) const;

  GaussianRational eval_exact(const GaussianRational& x) const;
  cd eval(cd x) const;

  // Sum of coefficient magnitude bounds: upper bound for sup |p| on the
  // closed unit disc, exact for real coefficients of one sign pattern.
  Rat sup_bound() const;

private:
  void trim();
  std::vector<GaussianRational> c_;
};

// Differential operator on the product side:
//   sum over (a,b) of p_{a,b}(w1) * w2^(b - order) * d^a_{w1} d^b_{w2},
// with a + b <= order. The w2 exponent is determined by (b, order).
struct WOperator {
  int order = 0;
  std::map<std::pair<int, int>, Poly1> terms;

  static WOperator identity();

  // Left-compose with d_{z1} = (1/w2) d_{w1}.
  WOperator compose_dz1() const;
  // Left-compose with d_{z2} = -(w1/w2) d_{w1} + d_{w2}.
  WOperator compose_dz2() const;

  std::string to_json() const;
};

// The operator equal to D_z^beta pushed through z = Psi(w); by default
// composes the z2 derivatives first, then the z1 derivatives (the two
// orders agree; asserted in tests).
WOperator transfer_dz(MultiIndex2 beta);
WOperator transfer_dz_z1_first(MultiIndex2 beta);

// Apply to a symbolic function of (w1, w2) at an exact point; w2 must be
// nonzero (the operator carries negative w2 powers).
GaussianRational apply_woperator(const WOperator& op, const SymbolicFunction& f,
                                 const GaussianRational& w1, const GaussianRational& w2);
cd apply_woperator(const WOperator& op, const SymbolicFunction& f, cd w1, cd w2);

double coeff_sup_bound(const WOperator& op);
Rat coeff_sup_bound_exact(const WOperator& op);

// Expansion of a tangential power: T^order = sum_j c[j] * conj(w)^j * d^j_{conj w}
// as an operator on antiholomorphic functions, T = (1/2i)(w d_w - conj(w) d_conj(w)).
struct TangentialForm {
  int order = 0;
  std::vector<GaussianRational> c;  // size order + 1
};

TangentialForm tangential_power(int b);

// Inverse expansion: coefficients d[j] with
//   conj(w)^b d^b_{conj w} = sum_j d[j] T^j  on antiholomorphic functions.
std::vector<GaussianRational> tangential_expansion(int b);

// One application of T as a symbolic operator in the given slot (1 or 2).
SymbolicFunction tangential_raw(const SymbolicFunction& f, int slot = 2);

// Apply an expanded tangential power to a slot-2 function at the point w.
GaussianRational apply_tangential(const TangentialForm& form, const SymbolicFunction& f,
                                  const GaussianRational& w);
cd apply_tangential(const TangentialForm& form, const SymbolicFunction& f, cd w);

// |T applied to the circle defining function |w|^2 - rho^2, evaluated at
// rho*e^(i*theta)|. Identically zero; computed exactly and returned as float.
double check_tangency(double rho, double theta);

}  // namespace hartogs
