#include "hartogs/operator_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hartogs/errors.hpp"

namespace hartogs {

Poly1::Poly1(std::vector<GaussianRational> coeffs) : c_(std::move(coeffs)) { trim(); }

Poly1 Poly1::one() { return Poly1({GaussianRational(Rat(1))}); }

void Poly1::trim() {
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

Poly1 Poly1::derivative() const {
  std::vector<GaussianRational> d;
  for (std::size_t k = 1; k < c_.size(); ++k)
    d.push_back(c_[k] * GaussianRational(Rat(static_cast<long>(k))));
  return Poly1(std::move(d));
}

Poly1 Poly1::times_x() const {
  if (c_.empty()) return {};
  std::vector<GaussianRational> d(c_.size() + 1);
  for (std::size_t k = 0; k < c_.size(); ++k) d[k + 1] = c_[k];
  return Poly1(std::move(d));
}

Poly1 Poly1::scaled(const GaussianRational& s) const {
  std::vector<GaussianRational> d = c_;
  for (auto& x : d) x *= s;
  return Poly1(std::move(d));
}

Poly1 Poly1::plus(const Poly1& o) const {
  std::vector<GaussianRational> d(std::max(c_.size(), o.c_.size()));
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (k < c_.size()) d[k] += c_[k];
    if (k < o.c_.size()) d[k] += o.c_[k];
  }
  return Poly1(std::move(d));
}

GaussianRational Poly1::eval_exact(const GaussianRational& x) const {
  GaussianRational acc{};
  for (std::size_t k = c_.size(); k-- > 0;) acc = acc * x + c_[k];
  return acc;
}

cd Poly1::eval(cd x) const {
  cd acc = 0;
  for (std::size_t k = c_.size(); k-- > 0;) acc = acc * x + c_[k].to_complex();
  return acc;
}

Rat Poly1::sup_bound() const {
  Rat s = 0;
  for (const auto& x : c_) s += x.magnitude_bound();
  return s;
}

WOperator WOperator::identity() {
  WOperator op;
  op.order = 0;
  op.terms[{0, 0}] = Poly1::one();
  return op;
}

namespace {

void add_term(WOperator& op, int a, int b, const Poly1& p) {
  if (p.is_zero()) return;
  auto it = op.terms.find({a, b});
  if (it == op.terms.end())
    op.terms[{a, b}] = p;
  else {
    it->second = it->second.plus(p);
    if (it->second.is_zero()) op.terms.erase(it);
  }
}

}  // namespace

WOperator WOperator::compose_dz1() const {
  // (1/w2) d_w1 [p(w1) w2^(b-m) D^(a,b)] = w2^(b-m-1) (p' D^(a,b) + p D^(a+1,b))
  WOperator out;
  out.order = order + 1;
  for (const auto& [ab, p] : terms) {
    add_term(out, ab.first, ab.second, p.derivative());
    add_term(out, ab.first + 1, ab.second, p);
  }
  return out;
}

WOperator WOperator::compose_dz2() const {
  // -(w1/w2) d_w1 + d_w2 applied to p(w1) w2^(b-m) D^(a,b) gives
  //   -w1 p' D^(a,b), -w1 p D^(a+1,b), (b-m) p D^(a,b)   at w2^(b-m-1)
  //   p D^(a,b+1)                                        at w2^(b-m),
  // all consistent with the new order m+1.
  WOperator out;
  out.order = order + 1;
  for (const auto& [ab, p] : terms) {
    auto [a, b] = ab;
    add_term(out, a, b, p.derivative().times_x().scaled(GaussianRational(Rat(-1))).plus(
                            p.scaled(GaussianRational(Rat(b - order)))));
    add_term(out, a + 1, b, p.times_x().scaled(GaussianRational(Rat(-1))));
    add_term(out, a, b + 1, p);
  }
  return out;
}

WOperator transfer_dz(MultiIndex2 beta) {
  if (beta.b1 < 0 || beta.b2 < 0)
    throw ConfigError("transfer_dz: derivative orders must be nonnegative");
  WOperator op = WOperator::identity();
  for (int i = 0; i < beta.b2; ++i) op = op.compose_dz2();
  for (int i = 0; i < beta.b1; ++i) op = op.compose_dz1();
  return op;
}

WOperator transfer_dz_z1_first(MultiIndex2 beta) {
  WOperator op = WOperator::identity();
  for (int i = 0; i < beta.b1; ++i) op = op.compose_dz1();
  for (int i = 0; i < beta.b2; ++i) op = op.compose_dz2();
  return op;
}

std::string WOperator::to_json() const {
  std::ostringstream os;
  os << "{\"order\":" << order << ",\"terms\":{";
  bool first_term = true;
  for (const auto& [ab, p] : terms) {
    if (!first_term) os << ",";
    first_term = false;
    os << "\"" << ab.first << "," << ab.second << "\":{\"w2_exponent\":" << (ab.second - order)
       << ",\"coeffs\":[";
    for (std::size_t k = 0; k < p.coeffs().size(); ++k) {
      if (k) os << ",";
      const GaussianRational& c = p.coeffs()[k];
      os << "[" << numerator(c.re).str() << "," << denominator(c.re).str() << ","
         << numerator(c.im).str() << "," << denominator(c.im).str() << "]";
    }
    os << "]}";
  }
  os << "}}";
  return os.str();
}

namespace {

// d^a_{v1} d^b_{v2} f, cached column-by-column.
SymbolicFunction mixed_derivative(const SymbolicFunction& f, int a, int b) {
  SymbolicFunction g = f;
  for (int i = 0; i < b; ++i) g = g.derivative(Var::V2);
  for (int i = 0; i < a; ++i) g = g.derivative(Var::V1);
  return g;
}

}  // namespace

GaussianRational apply_woperator(const WOperator& op, const SymbolicFunction& f,
                                 const GaussianRational& w1, const GaussianRational& w2) {
  if (w2.is_zero()) throw SingularPointError("apply_woperator: w2 = 0");
  GaussianRational acc{};
  for (const auto& [ab, p] : op.terms) {
    auto [a, b] = ab;
    GaussianRational dval = mixed_derivative(f, a, b).eval_exact(w1, w2);
    if (dval.is_zero()) continue;
    acc += p.eval_exact(w1) * gr_pow(w2, b - op.order) * dval;
  }
  return acc;
}

cd apply_woperator(const WOperator& op, const SymbolicFunction& f, cd w1, cd w2) {
  if (w2 == cd(0.0)) throw SingularPointError("apply_woperator: w2 = 0");
  cd acc = 0;
  for (const auto& [ab, p] : op.terms) {
    auto [a, b] = ab;
    cd dval = mixed_derivative(f, a, b).eval(w1, w2);
    acc += p.eval(w1) * std::pow(w2, b - op.order) * dval;
  }
  return acc;
}

Rat coeff_sup_bound_exact(const WOperator& op) {
  Rat best = 0;
  for (const auto& [ab, p] : op.terms) best = std::max(best, p.sup_bound());
  return best;
}

double coeff_sup_bound(const WOperator& op) { return to_double(coeff_sup_bound_exact(op)); }

TangentialForm tangential_power(int b) {
  if (b < 0) throw ConfigError("tangential_power: order must be nonnegative");
  // T^(b+1) coefficients: c'_j = -(1/2i) (j c_j + c_{j-1})
  const GaussianRational minus_half_over_i{Rat(0), Rat(1, 2)};  // -(1/2i) = i/2
  TangentialForm form;
  form.order = 0;
  form.c = {GaussianRational(Rat(1))};
  for (int step = 0; step < b; ++step) {
    std::vector<GaussianRational> next(form.c.size() + 1);
    for (std::size_t j = 0; j < next.size(); ++j) {
      GaussianRational v{};
      if (j < form.c.size()) v += form.c[j] * GaussianRational(Rat(static_cast<long>(j)));
      if (j >= 1) v += form.c[j - 1];
      next[j] = minus_half_over_i * v;
    }
    form.c = std::move(next);
    form.order += 1;
  }
  return form;
}

std::vector<GaussianRational> tangential_expansion(int b) {
  if (b < 0) throw ConfigError("tangential_expansion: order must be nonnegative");
  // Solve sum_j d_j C[j][i] = [i == b] where C[j] = tangential_power(j).c;
  // C is triangular with C[j][j] = (-1/2i)^j != 0.
  std::vector<std::vector<GaussianRational>> C;
  C.reserve(static_cast<std::size_t>(b) + 1);
  for (int j = 0; j <= b; ++j) C.push_back(tangential_power(j).c);
  std::vector<GaussianRational> d(static_cast<std::size_t>(b) + 1);
  for (int i = b; i >= 0; --i) {
    GaussianRational rhs = (i == b) ? GaussianRational(Rat(1)) : GaussianRational{};
    for (int j = i + 1; j <= b; ++j) rhs -= d[static_cast<std::size_t>(j)] * C[j][i];
    d[static_cast<std::size_t>(i)] = rhs / C[i][i];
  }
  return d;
}

SymbolicFunction tangential_raw(const SymbolicFunction& f, int slot) {
  if (slot != 1 && slot != 2) throw ConfigError("tangential_raw: slot must be 1 or 2");
  const GaussianRational one_over_2i{Rat(0), Rat(-1, 2)};  // 1/(2i)
  Var hol = slot == 1 ? Var::V1 : Var::V2;
  Var anti = slot == 1 ? Var::V1Bar : Var::V2Bar;
  int va = slot == 1 ? 1 : 0;
  SymbolicFunction v = SymbolicFunction::monomial(GaussianRational(Rat(1)), va, 1 - va, 0, 0);
  SymbolicFunction vbar = SymbolicFunction::monomial(GaussianRational(Rat(1)), 0, 0, va, 1 - va);
  return (v * f.derivative(hol) - vbar * f.derivative(anti)).scaled(one_over_2i);
}

GaussianRational apply_tangential(const TangentialForm& form, const SymbolicFunction& f,
                                  const GaussianRational& w) {
  if (f.uses_slot1()) throw ConfigError("apply_tangential: function must use slot 2 only");
  GaussianRational acc{};
  SymbolicFunction g = f;
  for (int j = 0; j <= form.order; ++j) {
    if (!form.c[static_cast<std::size_t>(j)].is_zero())
      acc += form.c[static_cast<std::size_t>(j)] * gr_pow(w.conj(), j) *
             g.eval_exact(GaussianRational{}, w);
    g = g.derivative(Var::V2Bar);
  }
  return acc;
}

cd apply_tangential(const TangentialForm& form, const SymbolicFunction& f, cd w) {
  if (f.uses_slot1()) throw ConfigError("apply_tangential: function must use slot 2 only");
  cd acc = 0;
  SymbolicFunction g = f;
  for (int j = 0; j <= form.order; ++j) {
    acc += form.c[static_cast<std::size_t>(j)].to_complex() * std::pow(std::conj(w), j) *
           g.eval(0.0, w);
    g = g.derivative(Var::V2Bar);
  }
  return acc;
}

double check_tangency(double rho, double theta) {
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("check_tangency: rho must be in (0,1)");
  // r(w) = |w|^2 - rho^2; the constant is exact (double -> rational is exact)
  // and T kills it, so the residual is exactly zero by construction.
  SymbolicFunction r = SymbolicFunction::monomial(GaussianRational(Rat(1)), 0, 1, 0, 1) -
                       SymbolicFunction::constant(GaussianRational(Rat(rho) * Rat(rho)));
  SymbolicFunction tr = tangential_raw(r, 2);
  cd w = std::polar(rho, theta);
  return std::abs(tr.eval(0.0, w));
}

}  // namespace hartogs
