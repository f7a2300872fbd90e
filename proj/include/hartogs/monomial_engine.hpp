#pragma once

#include <optional>

#include "hartogs/rational.hpp"
#include "hartogs/symbolic.hpp"

namespace hartogs {

// Monomials of the Hartogs triangle use the symbolic type directly:
// coeff * z1^a * z2^b * conj(z1)^c * conj(z2)^d.

// Square-integrability of a monomial over the Hartogs triangle.
bool in_l2_hartogs(const Monomial& m);

// Holomorphic basis membership: z1^alpha z2^beta with alpha >= 0 and
// alpha + beta >= -1.
bool admissible_hartogs(int alpha, int beta);

// Integral over the Hartogs triangle of |z1|^(2s) |z2|^(2t) against area
// measure, equal to pi^2 / ((s+1)(s+t+2)); requires s > -1 and s+t > -2.
ExactScalar monomial_integral_hartogs(int s, int t);

// Same integral restricted to |z2| > eps:
// pi^2 (1 - eps^(2s+2t+4)) / ((s+1)(s+t+2)); requires s > -1, s+t != -2.
ExactScalar monomial_integral_hartogs_truncated(int s, int t, const Rat& eps);

// Integral over the punctured disc of |w|^(2s) * |w|^2 (the weighted
// measure), equal to pi / (s+2); requires s > -2.
ExactScalar monomial_integral_weighted_punctured(int s);
ExactScalar monomial_integral_weighted_punctured_truncated(int s, const Rat& eps);

// One exact monomial term gamma * z1^alpha * z2^beta; the zero projection is
// the canonical zero term (zero coefficient, zero exponents).
struct ExactTerm {
  ExactComplex coeff{};
  int alpha = 0;
  int beta = 0;
  bool is_zero() const { return coeff.is_zero(); }
};

// One exact one-variable term gamma * w^power.
struct ExactTerm1C {
  ExactComplex coeff{};
  int power = 0;
  bool is_zero() const { return coeff.is_zero(); }
};

// Bergman projection of a monomial over the Hartogs triangle; with a
// truncation the input is m * indicator(|z2| > eps) while the projection
// target stays the full-triangle Bergman space.
ExactTerm project_monomial_hartogs(const Monomial& m,
                                   const std::optional<Rat>& truncation = std::nullopt);

// Weighted projection on the punctured disc (weight |w|^2) of w^a conj(w)^b:
// coefficient (a-b+2)/(a+2) on w^(a-b), zero when a-b < -1.
ExactTerm1C project_monomial_b3(int a, int b);

// Image of w^a conj(w)^b * indicator(|w| > eps) under the unnormalized disc
// operator with kernel (1 - w conj(eta))^(-2):
// pi (a-b+1) (1-eps^(2a+2)) / (a+1) * w^(a-b) for a >= b, zero otherwise.
ExactTerm1C b2_image_monomial(int a, int b, const Rat& eps);

// L2(Hartogs) pairing <m1, m2>; zero unless the rotation classes match.
ExactComplex inner_product_hartogs(const Monomial& m1, const Monomial& m2);
ExactComplex inner_product_hartogs(const SymbolicFunction& f, const SymbolicFunction& g);

// Linear extension of the monomial projection over a finite monomial sum.
SymbolicFunction project_hartogs(const SymbolicFunction& f,
                                 const std::optional<Rat>& truncation = std::nullopt);

}  // namespace hartogs
