#pragma once

#include <string>
#include <vector>

#include "hartogs/operator_calculus.hpp"
#include "hartogs/rational.hpp"
#include "hartogs/symbolic.hpp"

namespace hartogs {

enum class KernelId { Disc, PuncturedDisc, WeightedPuncturedDisc, ProductModel, Hartogs };

KernelId parse_kernel_id(const std::string& tag);
std::string kernel_id_tag(KernelId id);
bool kernel_is_bivariate(KernelId id);

struct Point2 {
  cd z1{0.0};
  cd z2{0.0};
};

// Membership in the open domain the kernel reproduces on.
bool in_domain(KernelId id, cd w);
bool in_domain(KernelId id, Point2 z);

// Reproducing kernels against area measure:
//   Disc / PuncturedDisc:      1 / (pi (1 - w conj(eta))^2)
//   WeightedPuncturedDisc:     1 / (pi w conj(eta) (1 - w conj(eta))^2), weight |w|^2
//   ProductModel:              product of two disc kernels
//   Hartogs:                   z2 conj(zeta2) / (pi^2 (z2 conj(zeta2) - z1 conj(zeta1))^2
//                                               (1 - z2 conj(zeta2))^2)
// Throws SingularPointError outside the domain or on a vanishing denominator.
cd eval_kernel(KernelId id, cd w, cd eta);
cd eval_kernel(KernelId id, Point2 w, Point2 eta);

// Biholomorphism between the Hartogs triangle and the product model.
Point2 map_phi(Point2 z);   // (z1/z2, z2); z2 != 0
Point2 map_psi(Point2 w);   // (w1 w2, w2)
cd jacobian_det_psi(Point2 w);  // w2

// One term c * w^pw * conj(eta)^pe * (1 - w conj(eta))^(-ps), with an overall
// 1/pi applied at evaluation. The family is closed under d_w and d_conj(eta).
struct WeightedKernelTerm {
  Rat c{0};
  int pw = 0;
  int pe = 0;
  int ps = 0;
};
using WeightedKernelExpr = std::vector<WeightedKernelTerm>;

WeightedKernelExpr weighted_kernel_expr();
WeightedKernelExpr expr_d_w(const WeightedKernelExpr& e);
WeightedKernelExpr expr_d_etabar(const WeightedKernelExpr& e);
cd eval_expr(const WeightedKernelExpr& e, cd w, cd eta);

// d^b/d w^b and d^b/d conj(eta)^b of the weighted kernel, evaluated exactly
// term-by-term. b = 0 reproduces eval_kernel(WeightedPuncturedDisc, ...).
cd kernel_w2_derivative(int b, cd w2, cd eta2);
cd kernel_etabar_derivative(int b, cd w2, cd eta2);

// One summand of the transferred kernel derivative
//   p_{a,b}(w1) w2^(b-|beta|) * (1/pi) d^a_{w1}(1-w1 conj(eta1))^(-2)
//                             * d^b_{w2}[weighted kernel](w2, eta2).
struct KernelTerm {
  int a = 0;
  int b = 0;
  MultiIndex2 beta{};
  Poly1 p{};
};

std::vector<KernelTerm> make_kernel_terms(MultiIndex2 beta);
cd eval_kernel_term(const KernelTerm& term, Point2 w, Point2 eta);

}  // namespace hartogs
