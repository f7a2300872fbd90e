#include "hartogs/symbolic.hpp"

#include <algorithm>
#include <tuple>

namespace hartogs {

namespace {

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

auto exponent_key(const Monomial& m) { return std::tuple(m.a, m.b, m.c, m.d); }

}  // namespace

void ExponentBounds::include(const Monomial& m) {
  lo1 = std::min({lo1, m.a, m.c});
  hi1 = std::max({hi1, m.a, m.c});
  lo2 = std::min({lo2, m.b, m.d});
  hi2 = std::max({hi2, m.b, m.d});
}

void ExponentBounds::merge(const ExponentBounds& o) {
  lo1 = std::min(lo1, o.lo1);
  hi1 = std::max(hi1, o.hi1);
  lo2 = std::min(lo2, o.lo2);
  hi2 = std::max(hi2, o.hi2);
}

void PowerTables::build(cd v1, cd v2, const ExponentBounds& b) {
  lo1 = b.lo1;
  lo2 = b.lo2;
  auto fill = [](std::vector<cd>& t, cd v, int lo, int hi) {
    t.assign(static_cast<std::size_t>(hi - lo + 1), cd(1.0));
    // index of exponent 0
    std::size_t z = static_cast<std::size_t>(-lo);
    for (int e = 1; e <= hi; ++e) t[z + e] = t[z + e - 1] * v;
    if (lo < 0) {
      cd inv = 1.0 / v;
      for (int e = -1; e >= lo; --e) t[z + e] = t[z + e + 1] * inv;
    }
  };
  fill(t1, v1, std::min(b.lo1, 0), std::max(b.hi1, 0));
  fill(t2, v2, std::min(b.lo2, 0), std::max(b.hi2, 0));
  lo1 = std::min(b.lo1, 0);
  lo2 = std::min(b.lo2, 0);
}

SymbolicFunction::SymbolicFunction(std::vector<Monomial> terms) : terms_(std::move(terms)) {
  normalize();
}

SymbolicFunction SymbolicFunction::constant(GaussianRational c) {
  return SymbolicFunction({Monomial{std::move(c), 0, 0, 0, 0}});
}

SymbolicFunction SymbolicFunction::monomial(GaussianRational coeff, int a, int b, int c, int d) {
  return SymbolicFunction({Monomial{std::move(coeff), a, b, c, d}});
}

bool SymbolicFunction::uses_slot1() const {
  for (const Monomial& m : terms_)
    if (m.a != 0 || m.c != 0) return true;
  return false;
}

void SymbolicFunction::normalize() {
  std::sort(terms_.begin(), terms_.end(), [](const Monomial& x, const Monomial& y) {
    return exponent_key(x) < exponent_key(y);
  });
  std::vector<Monomial> out;
  for (Monomial& m : terms_) {
    if (!out.empty() && out.back().same_exponents(m)) {
      out.back().coeff += m.coeff;
      if (out.back().coeff.is_zero()) out.pop_back();
    } else if (!m.coeff.is_zero()) {
      out.push_back(std::move(m));
    }
  }
  terms_ = std::move(out);
}

SymbolicFunction SymbolicFunction::derivative(Var v) const {
  std::vector<Monomial> out;
  out.reserve(terms_.size());
  for (const Monomial& m : terms_) {
    Monomial n = m;
    int* e = nullptr;
    switch (v) {
      case Var::V1: e = &n.a; break;
      case Var::V2: e = &n.b; break;
      case Var::V1Bar: e = &n.c; break;
      case Var::V2Bar: e = &n.d; break;
    }
    if (*e == 0) continue;
    n.coeff *= GaussianRational(Rat(*e));
    *e -= 1;
    out.push_back(std::move(n));
  }
  return SymbolicFunction(std::move(out));
}

SymbolicFunction SymbolicFunction::conjugate() const {
  std::vector<Monomial> out;
  out.reserve(terms_.size());
  for (const Monomial& m : terms_) out.push_back({m.coeff.conj(), m.c, m.d, m.a, m.b});
  return SymbolicFunction(std::move(out));
}

SymbolicFunction SymbolicFunction::scaled(const GaussianRational& c) const {
  std::vector<Monomial> out;
  out.reserve(terms_.size());
  for (const Monomial& m : terms_) out.push_back({m.coeff * c, m.a, m.b, m.c, m.d});
  return SymbolicFunction(std::move(out));
}

SymbolicFunction SymbolicFunction::compose_psi() const {
  // v1^a v2^b conj(v1)^c conj(v2)^d  ->  w1^a w2^(a+b) conj(w1)^c conj(w2)^(c+d)
  std::vector<Monomial> out;
  out.reserve(terms_.size());
  for (const Monomial& m : terms_) out.push_back({m.coeff, m.a, m.a + m.b, m.c, m.c + m.d});
  return SymbolicFunction(std::move(out));
}

GaussianRational SymbolicFunction::eval_exact(const GaussianRational& v1,
                                              const GaussianRational& v2) const {
  GaussianRational acc{};
  for (const Monomial& m : terms_) {
    GaussianRational t = m.coeff;
    if (m.a != 0) t *= gr_pow(v1, m.a);
    if (m.b != 0) t *= gr_pow(v2, m.b);
    if (m.c != 0) t *= gr_pow(v1.conj(), m.c);
    if (m.d != 0) t *= gr_pow(v2.conj(), m.d);
    acc += t;
  }
  return acc;
}

cd SymbolicFunction::eval(cd v1, cd v2) const {
  cd acc = 0;
  for (const Monomial& m : terms_)
    acc += m.coeff.to_complex() * cpow_int(v1, m.a) * cpow_int(v2, m.b) *
           std::conj(cpow_int(v1, m.c) * cpow_int(v2, m.d));
  return acc;
}

ExponentBounds SymbolicFunction::bounds() const {
  ExponentBounds b;
  for (const Monomial& m : terms_) b.include(m);
  return b;
}

std::string SymbolicFunction::to_string() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const Monomial& m = terms_[i];
    if (i) s += " + ";
    s += "(" + gr_to_string(m.coeff) + ")";
    auto app = [&](const char* v, int e) {
      if (e == 0) return;
      s += std::string("*") + v;
      if (e != 1) s += "^" + std::to_string(e);
    };
    app("v1", m.a);
    app("v2", m.b);
    app("v1~", m.c);
    app("v2~", m.d);
  }
  return s;
}

SymbolicFunction operator+(const SymbolicFunction& f, const SymbolicFunction& g) {
  std::vector<Monomial> t = f.terms_;
  t.insert(t.end(), g.terms_.begin(), g.terms_.end());
  return SymbolicFunction(std::move(t));
}

SymbolicFunction operator-(const SymbolicFunction& f, const SymbolicFunction& g) {
  std::vector<Monomial> t = f.terms_;
  for (const Monomial& m : g.terms_) t.push_back({-m.coeff, m.a, m.b, m.c, m.d});
  return SymbolicFunction(std::move(t));
}

SymbolicFunction operator*(const SymbolicFunction& f, const SymbolicFunction& g) {
  std::vector<Monomial> t;
  t.reserve(f.terms_.size() * g.terms_.size());
  for (const Monomial& x : f.terms_)
    for (const Monomial& y : g.terms_)
      t.push_back({x.coeff * y.coeff, x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d});
  return SymbolicFunction(std::move(t));
}

CompiledFunction CompiledFunction::from(const SymbolicFunction& f) {
  CompiledFunction out;
  out.bounds = f.bounds();
  out.entries.reserve(f.terms().size());
  for (const Monomial& m : f.terms())
    out.entries.push_back({m.coeff.to_complex(), m.a, m.b, m.c, m.d});
  return out;
}

}  // namespace hartogs
