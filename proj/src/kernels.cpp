#include "hartogs/kernels.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

#include "hartogs/errors.hpp"

namespace hartogs {

namespace {

constexpr double kPi = std::numbers::pi;

cd cpow_int(cd z, int n) {
  if (n == 0) return 1.0;
  if (n < 0) return 1.0 / cpow_int(z, -n);
  cd base = z, acc = 1.0;
  while (n > 0) {
    if (n & 1) acc *= base;
    base *= base;
    n >>= 1;
  }
  return acc;
}

[[noreturn]] void singular(const std::string& what) { throw SingularPointError(what); }

}  // namespace

KernelId parse_kernel_id(const std::string& tag) {
  std::string t;
  for (char ch : tag) t += (ch == '_') ? '-' : static_cast<char>(std::tolower(ch));
  if (t == "disc") return KernelId::Disc;
  if (t == "punctured" || t == "punctured-disc") return KernelId::PuncturedDisc;
  if (t == "weighted" || t == "weighted-punctured" || t == "weighted-punctured-disc")
    return KernelId::WeightedPuncturedDisc;
  if (t == "product" || t == "product-model") return KernelId::ProductModel;
  if (t == "hartogs") return KernelId::Hartogs;
  throw ConfigError("unknown kernel id '" + tag + "'");
}

std::string kernel_id_tag(KernelId id) {
  switch (id) {
    case KernelId::Disc: return "disc";
    case KernelId::PuncturedDisc: return "punctured-disc";
    case KernelId::WeightedPuncturedDisc: return "weighted-punctured-disc";
    case KernelId::ProductModel: return "product-model";
    case KernelId::Hartogs: return "hartogs";
  }
  return "?";
}

bool kernel_is_bivariate(KernelId id) {
  return id == KernelId::ProductModel || id == KernelId::Hartogs;
}

bool in_domain(KernelId id, cd w) {
  switch (id) {
    case KernelId::Disc: return std::abs(w) < 1.0;
    case KernelId::PuncturedDisc:
    case KernelId::WeightedPuncturedDisc: return w != cd(0.0) && std::abs(w) < 1.0;
    default: return false;
  }
}

bool in_domain(KernelId id, Point2 z) {
  switch (id) {
    case KernelId::ProductModel:
      return std::abs(z.z1) < 1.0 && z.z2 != cd(0.0) && std::abs(z.z2) < 1.0;
    case KernelId::Hartogs: return std::abs(z.z1) < std::abs(z.z2) && std::abs(z.z2) < 1.0;
    default: return false;
  }
}

cd eval_kernel(KernelId id, cd w, cd eta) {
  if (kernel_is_bivariate(id))
    throw ConfigError("eval_kernel: " + kernel_id_tag(id) + " takes two-component points");
  if (!in_domain(id, w) || !in_domain(id, eta))
    singular("eval_kernel(" + kernel_id_tag(id) + "): point outside domain");
  cd x = w * std::conj(eta);
  cd den = (1.0 - x) * (1.0 - x);
  if (den == cd(0.0)) singular("eval_kernel: singular denominator");
  switch (id) {
    case KernelId::Disc:
    case KernelId::PuncturedDisc: return 1.0 / (kPi * den);
    case KernelId::WeightedPuncturedDisc:
      if (x == cd(0.0)) singular("eval_kernel: singular denominator (w conj(eta) = 0)");
      return 1.0 / (kPi * x * den);
    default: break;
  }
  singular("eval_kernel: unreachable");
}

cd eval_kernel(KernelId id, Point2 w, Point2 eta) {
  if (!kernel_is_bivariate(id))
    throw ConfigError("eval_kernel: " + kernel_id_tag(id) + " takes one-component points");
  if (!in_domain(id, w) || !in_domain(id, eta))
    singular("eval_kernel(" + kernel_id_tag(id) + "): point outside domain");
  if (id == KernelId::ProductModel) {
    cd d1 = 1.0 - w.z1 * std::conj(eta.z1);
    cd d2 = 1.0 - w.z2 * std::conj(eta.z2);
    if (d1 == cd(0.0) || d2 == cd(0.0)) singular("eval_kernel: singular denominator");
    return 1.0 / (kPi * kPi * d1 * d1 * d2 * d2);
  }
  cd t = w.z2 * std::conj(eta.z2);
  cd s = t - w.z1 * std::conj(eta.z1);
  cd u = 1.0 - t;
  if (s == cd(0.0) || u == cd(0.0)) singular("eval_kernel: singular denominator");
  return t / (kPi * kPi * s * s * u * u);
}

Point2 map_phi(Point2 z) {
  if (z.z2 == cd(0.0)) singular("map_phi: z2 = 0");
  return {z.z1 / z.z2, z.z2};
}

Point2 map_psi(Point2 w) { return {w.z1 * w.z2, w.z2}; }

cd jacobian_det_psi(Point2 w) { return w.z2; }

WeightedKernelExpr weighted_kernel_expr() { return {{Rat(1), -1, -1, 2}}; }

namespace {

void expr_add(WeightedKernelExpr& out, const WeightedKernelTerm& t) {
  if (t.c == 0) return;
  for (auto& u : out) {
    if (u.pw == t.pw && u.pe == t.pe && u.ps == t.ps) {
      u.c += t.c;
      return;
    }
  }
  out.push_back(t);
}

WeightedKernelExpr expr_normalize(WeightedKernelExpr e) {
  e.erase(std::remove_if(e.begin(), e.end(), [](const auto& t) { return t.c == 0; }), e.end());
  std::sort(e.begin(), e.end(), [](const auto& x, const auto& y) {
    return std::tuple(x.pw, x.pe, x.ps) < std::tuple(y.pw, y.pe, y.ps);
  });
  return e;
}

}  // namespace

WeightedKernelExpr expr_d_w(const WeightedKernelExpr& e) {
  // d_w [w^pw e^pe (1-we)^-ps] = pw w^(pw-1) e^pe (1-we)^-ps
  //                              + ps w^pw e^(pe+1) (1-we)^-(ps+1)
  WeightedKernelExpr out;
  for (const auto& t : e) {
    expr_add(out, {t.c * t.pw, t.pw - 1, t.pe, t.ps});
    expr_add(out, {t.c * t.ps, t.pw, t.pe + 1, t.ps + 1});
  }
  return expr_normalize(std::move(out));
}

WeightedKernelExpr expr_d_etabar(const WeightedKernelExpr& e) {
  WeightedKernelExpr out;
  for (const auto& t : e) {
    expr_add(out, {t.c * t.pe, t.pw, t.pe - 1, t.ps});
    expr_add(out, {t.c * t.ps, t.pw + 1, t.pe, t.ps + 1});
  }
  return expr_normalize(std::move(out));
}

cd eval_expr(const WeightedKernelExpr& e, cd w, cd eta) {
  cd eb = std::conj(eta);
  cd one_minus = 1.0 - w * eb;
  if (w == cd(0.0) || eb == cd(0.0) || one_minus == cd(0.0))
    singular("eval_expr: singular denominator");
  cd acc = 0;
  for (const auto& t : e)
    acc += to_double(t.c) * cpow_int(w, t.pw) * cpow_int(eb, t.pe) * cpow_int(one_minus, -t.ps);
  return acc / kPi;
}

namespace {

const WeightedKernelExpr& cached_w2_derivative(int b) {
  static std::map<int, WeightedKernelExpr> cache;
  auto it = cache.find(b);
  if (it != cache.end()) return it->second;
  WeightedKernelExpr e = weighted_kernel_expr();
  for (int i = 0; i < b; ++i) e = expr_d_w(e);
  return cache.emplace(b, std::move(e)).first->second;
}

const WeightedKernelExpr& cached_etabar_derivative(int b) {
  static std::map<int, WeightedKernelExpr> cache;
  auto it = cache.find(b);
  if (it != cache.end()) return it->second;
  WeightedKernelExpr e = weighted_kernel_expr();
  for (int i = 0; i < b; ++i) e = expr_d_etabar(e);
  return cache.emplace(b, std::move(e)).first->second;
}

}  // namespace

cd kernel_w2_derivative(int b, cd w2, cd eta2) {
  if (b < 0) throw ConfigError("kernel_w2_derivative: b must be nonnegative");
  return eval_expr(cached_w2_derivative(b), w2, eta2);
}

cd kernel_etabar_derivative(int b, cd w2, cd eta2) {
  if (b < 0) throw ConfigError("kernel_etabar_derivative: b must be nonnegative");
  return eval_expr(cached_etabar_derivative(b), w2, eta2);
}

std::vector<KernelTerm> make_kernel_terms(MultiIndex2 beta) {
  WOperator op = transfer_dz(beta);
  std::vector<KernelTerm> out;
  out.reserve(op.terms.size());
  for (const auto& [ab, p] : op.terms) out.push_back({ab.first, ab.second, beta, p});
  return out;
}

cd eval_kernel_term(const KernelTerm& term, Point2 w, Point2 eta) {
  if (w.z2 == cd(0.0)) singular("eval_kernel_term: w2 = 0");
  cd e1b = std::conj(eta.z1);
  cd d1 = 1.0 - w.z1 * e1b;
  if (d1 == cd(0.0)) singular("eval_kernel_term: singular slot-1 denominator");
  double fact = 1.0;
  for (int k = 2; k <= term.a + 1; ++k) fact *= k;  // (a+1)!
  cd slot1 = fact * cpow_int(e1b, term.a) * cpow_int(d1, -(2 + term.a)) / kPi;
  cd slot2 = kernel_w2_derivative(term.b, w.z2, eta.z2);
  return term.p.eval(w.z1) * cpow_int(w.z2, term.b - term.beta.total()) * slot1 * slot2;
}

}  // namespace hartogs
