#include "hartogs/monomial_engine.hpp"

#include <string>

#include "hartogs/errors.hpp"

namespace hartogs {

bool in_l2_hartogs(const Monomial& m) {
  return (m.a + m.c) > -1 && (m.a + m.c) + (m.b + m.d) > -2;
}

bool admissible_hartogs(int alpha, int beta) { return alpha >= 0 && alpha + beta >= -1; }

ExactScalar monomial_integral_hartogs(int s, int t) {
  if (!(s > -1 && s + t > -2))
    throw DivergenceError("monomial_integral_hartogs requires s > -1 and s+t > -2, got s=" +
                          std::to_string(s) + ", t=" + std::to_string(t));
  return {Rat(1, static_cast<long>(s + 1) * (s + t + 2)), 2};
}

ExactScalar monomial_integral_hartogs_truncated(int s, int t, const Rat& eps) {
  if (!(s > -1))
    throw DivergenceError("truncated Hartogs integral requires s > -1, got s=" +
                          std::to_string(s));
  if (s + t == -2)
    throw DivergenceError(
        "truncated Hartogs integral has a logarithmic radial part at s+t = -2 and is not "
        "an ExactScalar");
  if (!(eps > 0 && eps < 1)) throw ConfigError("truncation must lie in (0,1)");
  Rat deficit = rat_pow(eps, 2 * (s + t) + 4);
  return {(Rat(1) - deficit) / (Rat(s + 1) * Rat(s + t + 2)), 2};
}

ExactScalar monomial_integral_weighted_punctured(int s) {
  if (!(s > -2))
    throw DivergenceError("weighted punctured integral requires s > -2, got s=" +
                          std::to_string(s));
  return {Rat(1, s + 2), 1};
}

ExactScalar monomial_integral_weighted_punctured_truncated(int s, const Rat& eps) {
  if (!(s > -2))
    throw DivergenceError("weighted punctured integral requires s > -2, got s=" +
                          std::to_string(s));
  if (!(eps > 0 && eps < 1)) throw ConfigError("truncation must lie in (0,1)");
  return {(Rat(1) - rat_pow(eps, 2 * s + 4)) / Rat(s + 2), 1};
}

ExactTerm project_monomial_hartogs(const Monomial& m, const std::optional<Rat>& truncation) {
  if (m.coeff.is_zero()) return {};
  if (!in_l2_hartogs(m))
    throw SingularPointError("project_monomial_hartogs: monomial not square-integrable");
  int alpha = m.a - m.c;
  int beta = m.b - m.d;
  if (!admissible_hartogs(alpha, beta)) return {};
  // Pairing exponents are (s,t) = (a,b); convergence follows from
  // square-integrability plus admissibility of the target (2(a+b) > -3).
  ExactScalar pairing = truncation ? monomial_integral_hartogs_truncated(m.a, m.b, *truncation)
                                   : monomial_integral_hartogs(m.a, m.b);
  ExactScalar basis_norm_sq = monomial_integral_hartogs(alpha, beta);
  ExactTerm out;
  out.coeff = ec_div({m.coeff * GaussianRational(pairing.q), pairing.pi_power},
                     {GaussianRational(basis_norm_sq.q), basis_norm_sq.pi_power});
  out.alpha = alpha;
  out.beta = beta;
  return out;
}

ExactTerm1C project_monomial_b3(int a, int b) {
  if (!(a + b > -2))
    throw SingularPointError("project_monomial_b3: monomial not in the weighted L2 space");
  int n = a - b;
  if (n < -1) return {};
  // <h, w^n>_w = pi/(a+2), ||w^n||_w^2 = pi/(n+2)
  ExactScalar pairing = monomial_integral_weighted_punctured(a);
  ExactScalar basis_norm_sq = monomial_integral_weighted_punctured(n);
  ExactTerm1C out;
  out.coeff = ec_div({GaussianRational(pairing.q), pairing.pi_power},
                     {GaussianRational(basis_norm_sq.q), basis_norm_sq.pi_power});
  out.power = n;
  return out;
}

ExactTerm1C b2_image_monomial(int a, int b, const Rat& eps) {
  if (a < 0 || b < 0) throw ConfigError("b2_image_monomial: exponents must be nonnegative");
  if (!(eps >= 0 && eps < 1)) throw ConfigError("truncation must lie in [0,1)");
  int n = a - b;
  if (n < 0) return {};
  ExactTerm1C out;
  Rat deficit = eps == 0 ? Rat(0) : rat_pow(eps, 2 * a + 2);
  out.coeff = {GaussianRational(Rat(n + 1) * (Rat(1) - deficit) / Rat(a + 1)), 1};
  out.power = n;
  return out;
}

ExactComplex inner_product_hartogs(const Monomial& m1, const Monomial& m2) {
  // m1 * conj(m2) has z1 exponents (a1 + c2, c1 + a2), z2 exponents
  // (b1 + d2, d1 + b2); the integral vanishes unless both pairs match.
  if (m1.coeff.is_zero() || m2.coeff.is_zero()) return {};
  if (m1.a + m2.c != m1.c + m2.a || m1.b + m2.d != m1.d + m2.b) return {};
  int s = m1.a + m2.c;
  int t = m1.b + m2.d;
  ExactScalar integral = monomial_integral_hartogs(s, t);
  return {m1.coeff * m2.coeff.conj() * GaussianRational(integral.q), integral.pi_power};
}

ExactComplex inner_product_hartogs(const SymbolicFunction& f, const SymbolicFunction& g) {
  ExactComplex acc{};
  for (const Monomial& mf : f.terms())
    for (const Monomial& mg : g.terms()) acc = ec_add(acc, inner_product_hartogs(mf, mg));
  return acc;
}

SymbolicFunction project_hartogs(const SymbolicFunction& f, const std::optional<Rat>& truncation) {
  std::vector<Monomial> out;
  for (const Monomial& m : f.terms()) {
    ExactTerm t = project_monomial_hartogs(m, truncation);
    if (t.is_zero()) continue;
    if (t.coeff.pi_power != 0)
      throw SingularPointError("project_monomial_hartogs: projection coefficient not rational");
    out.push_back({t.coeff.q, t.alpha, t.beta, 0, 0});
  }
  return SymbolicFunction(std::move(out));
}

}  // namespace hartogs
