#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "hartogs/errors.hpp"
#include "hartogs/monomial_engine.hpp"
#include "hartogs/rational.hpp"
#include "hartogs/symbolic.hpp"

using namespace hartogs;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

// composite Simpson rule, n even
double simpson(const std::function<double(double)>& f, double lo, double hi, int n) {
    double h = (hi - lo) / n;
    double acc = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) acc += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

// numeric oracle: integral of |z1|^(2s) |z2|^(2t) over the Hartogs triangle
// restricted to |z2| > cutoff, via iterated polar coordinates with the inner
// radius scaled as r1 = r2 * u:
//   4 pi^2 * (int_0^1 u^(2s+1) du) * (int_cutoff^1 r^(2s+2t+3) dr)
double hartogs_moment_numeric(int s, int t, double cutoff) {
    auto inner = simpson([s](double u) { return std::pow(u, 2 * s + 1); }, 0, 1, 512);
    auto outer = simpson([s, t](double r) { return std::pow(r, 2 * s + 2 * t + 3); },
                         cutoff, 1, 512);
    return 4 * kPi * kPi * inner * outer;
}

Monomial mono(GaussianRational coeff, int a, int b, int c, int d) {
    return Monomial{std::move(coeff), a, b, c, d};
}

bool ec_equal(const ExactComplex& x, const ExactComplex& y) {
    if (x.is_zero() || y.is_zero()) return x.is_zero() && y.is_zero();
    return x.q == y.q && x.pi_power == y.pi_power;
}
}  // namespace

TEST_CASE("closed-form moments match numeric integration") {
    struct Row {
        int s, t;
        Rat q;  // value = q * pi^2
    };
    std::vector<Row> rows = {
        {0, 0, Rat(1) / 2}, {0, -1, Rat(1)},     {1, 0, Rat(1) / 6},
        {2, 1, Rat(1) / 15}, {0, 1, Rat(1) / 3}, {3, -2, Rat(1) / 12},
    };
    for (const Row& r : rows) {
        ExactScalar v = monomial_integral_hartogs(r.s, r.t);
        REQUIRE(v.q == r.q);
        REQUIRE(v.pi_power == 2);
        // independent numeric integration
        CHECK(std::abs(v.to_double() - hartogs_moment_numeric(r.s, r.t, 0.0)) <
              1e-9 * v.to_double());
    }

    // weighted punctured disc: pi / (s+2)
    ExactScalar w0 = monomial_integral_weighted_punctured(0);
    REQUIRE(w0.q == Rat(1) / 2);
    REQUIRE(w0.pi_power == 1);
    ExactScalar wm1 = monomial_integral_weighted_punctured(-1);
    REQUIRE(wm1.q == Rat(1));
    REQUIRE(wm1.pi_power == 1);
    for (int s = -1; s <= 4; ++s) {
        double numeric =
            2 * kPi * simpson([s](double r) { return std::pow(r, 2 * s + 3); }, 0, 1, 4096);
        CHECK(std::abs(monomial_integral_weighted_punctured(s).to_double() - numeric) < 1e-10);
    }
}

TEST_CASE("truncated moments") {
    Rat eps = Rat(1) / 2;
    ExactScalar v = monomial_integral_hartogs_truncated(0, 0, eps);
    REQUIRE(v.q == Rat(15) / 32);  // (1 - 2^-4) / 2
    REQUIRE(v.pi_power == 2);
    CHECK(std::abs(v.to_double() - hartogs_moment_numeric(0, 0, 0.5)) < 1e-9 * v.to_double());

    ExactScalar vt = monomial_integral_hartogs_truncated(1, -1, Rat(1) / 10);
    // pi^2 (1 - 10^-4) / ((2)(2))
    REQUIRE(vt.q == Rat(9999) / 40000);
    CHECK(std::abs(vt.to_double() - hartogs_moment_numeric(1, -1, 0.1)) < 1e-8 * vt.to_double());

    ExactScalar wt = monomial_integral_weighted_punctured_truncated(0, Rat(3) / 10);
    // pi (1 - (3/10)^4) / 2
    REQUIRE(wt.q == (Rat(1) - rat_pow(Rat(3) / 10, 4)) / 2);
    REQUIRE(wt.pi_power == 1);

    CHECK_THROWS_AS(monomial_integral_hartogs_truncated(0, 0, Rat(0)), ConfigError);
    CHECK_THROWS_AS(monomial_integral_hartogs_truncated(0, 0, Rat(1)), ConfigError);
    CHECK_THROWS_AS(monomial_integral_hartogs_truncated(0, 0, Rat(3) / 2), ConfigError);
}

TEST_CASE("divergent moments are rejected") {
    CHECK_THROWS_AS(monomial_integral_hartogs(-1, 0), DivergenceError);
    CHECK_THROWS_AS(monomial_integral_hartogs(0, -2), DivergenceError);
    CHECK_THROWS_AS(monomial_integral_hartogs(2, -5), DivergenceError);
    CHECK_THROWS_AS(monomial_integral_hartogs_truncated(-1, 0, Rat(1) / 2), DivergenceError);
    CHECK_THROWS_AS(monomial_integral_hartogs_truncated(0, -2, Rat(1) / 2), DivergenceError);
    CHECK_THROWS_AS(monomial_integral_weighted_punctured(-2), DivergenceError);
    CHECK_THROWS_AS(monomial_integral_weighted_punctured_truncated(-2, Rat(1) / 2),
                    DivergenceError);
}

TEST_CASE("membership predicates") {
    CHECK(in_l2_hartogs(mono(1, 0, 0, 0, 1)));    // conj(z2)
    CHECK(in_l2_hartogs(mono(1, 0, -1, 0, 0)));   // 1/z2
    CHECK_FALSE(in_l2_hartogs(mono(1, 0, -2, 0, 0)));
    CHECK_FALSE(in_l2_hartogs(mono(1, -1, 0, 0, 0)));
    CHECK(in_l2_hartogs(mono(1, 1, -2, 0, 0)));   // z1 / z2^2
    CHECK_FALSE(in_l2_hartogs(mono(1, 0, 0, 0, -2)));
    CHECK(in_l2_hartogs(mono(1, 2, 1, 1, -3)));   // a+c=3, b+d=-2, sum 1 > -2

    CHECK(admissible_hartogs(0, 0));
    CHECK(admissible_hartogs(0, -1));
    CHECK(admissible_hartogs(2, -3));
    CHECK_FALSE(admissible_hartogs(0, -2));
    CHECK_FALSE(admissible_hartogs(-1, 0));
    CHECK_FALSE(admissible_hartogs(1, -3));
}

TEST_CASE("projection of a monomial follows the orthogonal expansion") {
    // B(z1^a z2^b conj(z1)^c conj(z2)^d) lands in the rotation class
    // (alpha, beta) = (a-c, b-d); nonzero only if that class is admissible,
    // with coefficient <m, e_class> / |e_class|^2, a ratio of the two moment
    // closed forms:
    //   (alpha+1)(alpha+beta+2) / ((a+1)(a+b+2)).
    for (int a = 0; a <= 3; ++a)
        for (int c = 0; c <= 3; ++c)
            for (int b = -2; b <= 2; ++b)
                for (int d = -1; d <= 2; ++d) {
                    Monomial m = mono(GaussianRational(Rat(1), Rat(2)), a, b, c, d);
                    if (!in_l2_hartogs(m)) continue;
                    int alpha = a - c, beta = b - d;
                    ExactTerm got = project_monomial_hartogs(m);
                    if (!admissible_hartogs(alpha, beta)) {
                        REQUIRE(got.is_zero());
                        continue;
                    }
                    Rat expected = Rat(alpha + 1) * Rat(alpha + beta + 2) /
                                   (Rat(a + 1) * Rat(a + b + 2));
                    REQUIRE_FALSE(got.is_zero());
                    REQUIRE(got.alpha == alpha);
                    REQUIRE(got.beta == beta);
                    REQUIRE(got.coeff.pi_power == 0);
                    REQUIRE(got.coeff.q == m.coeff * GaussianRational(expected));
                }
}

TEST_CASE("pinned projections") {
    // conj(z2) -> (1/2) / z2
    ExactTerm t = project_monomial_hartogs(mono(1, 0, 0, 0, 1));
    REQUIRE(t.coeff.q == GaussianRational(Rat(1) / 2));
    REQUIRE(t.coeff.pi_power == 0);
    REQUIRE(t.alpha == 0);
    REQUIRE(t.beta == -1);

    // conj(z1) -> 0 (class (-1, 0) not admissible)
    CHECK(project_monomial_hartogs(mono(1, 0, 0, 1, 0)).is_zero());

    // holomorphic admissible monomials are fixed points
    for (auto [al, be] : std::vector<std::pair<int, int>>{{0, 0}, {1, 0}, {0, -1}, {2, -3}}) {
        ExactTerm fix = project_monomial_hartogs(mono(1, al, be, 0, 0));
        REQUIRE(fix.coeff.q == GaussianRational(1));
        REQUIRE(fix.alpha == al);
        REQUIRE(fix.beta == be);
    }

    // truncated input: conj(z2) * indicator(|z2| > eps) -> (1-eps^4)/2 / z2
    Rat eps = Rat(1) / 2;
    ExactTerm tt = project_monomial_hartogs(mono(1, 0, 0, 0, 1), eps);
    REQUIRE(tt.coeff.q == GaussianRational(Rat(15) / 32));
    REQUIRE(tt.alpha == 0);
    REQUIRE(tt.beta == -1);

    // non-square-integrable input is rejected
    CHECK_THROWS_AS(project_monomial_hartogs(mono(1, 0, -2, 0, 0)), SingularPointError);
    CHECK_THROWS_AS(project_monomial_hartogs(mono(1, 0, 0, 0, 1), Rat(2)), ConfigError);
}

TEST_CASE("weighted projection on the punctured disc") {
    // (a-b+2)/(a+2) * w^(a-b), zero when a-b < -1; oracle is the ratio of
    // weighted moments <w^a wbar^b, w^(a-b)>_w / |w^(a-b)|_w^2
    for (int a = -1; a <= 4; ++a)
        for (int b = 0; b <= 4; ++b) {
            if (a + b < -1) continue;  // outside the weighted L2 space
            ExactTerm1C got = project_monomial_b3(a, b);
            if (a - b < -1) {
                REQUIRE(got.is_zero());
                continue;
            }
            ExactScalar pair = monomial_integral_weighted_punctured(a);
            ExactScalar nrm = monomial_integral_weighted_punctured(a - b);
            REQUIRE(pair.pi_power == nrm.pi_power);
            REQUIRE(got.coeff.q == GaussianRational(pair.q / nrm.q));
            REQUIRE(got.coeff.pi_power == 0);
            REQUIRE(got.power == a - b);
        }
    // pinned: wbar -> (1/2) / w, the one-variable face of the triangle fact
    ExactTerm1C t = project_monomial_b3(0, 1);
    REQUIRE(t.coeff.q == GaussianRational(Rat(1) / 2));
    REQUIRE(t.power == -1);
    CHECK(project_monomial_b3(0, 2).is_zero());
    CHECK(project_monomial_b3(-1, 1).is_zero());       // a+b = 0: in the space, image 0
    CHECK_THROWS_AS(project_monomial_b3(-2, 0), SingularPointError);
    CHECK_THROWS_AS(project_monomial_b3(-1, -1), SingularPointError);
}

TEST_CASE("unnormalized disc operator on truncated monomials") {
    // closed form pi (a-b+1)(1-eps^(2a+2))/(a+1) w^(a-b) for a >= b
    Rat eps = Rat(3) / 10;
    ExactTerm1C t = b2_image_monomial(1, 0, eps);
    REQUIRE(t.power == 1);
    REQUIRE(t.coeff.pi_power == 1);
    REQUIRE(t.coeff.q == GaussianRational(Rat(2) * (Rat(1) - rat_pow(eps, 4)) / Rat(2)));
    CHECK(b2_image_monomial(0, 1, eps).is_zero());
    CHECK(b2_image_monomial(2, 3, eps).is_zero());

    // eps = 0 allowed (no truncation); constant maps to pi * 1
    ExactTerm1C c0 = b2_image_monomial(0, 0, Rat(0));
    REQUIRE(c0.coeff.q == GaussianRational(1));
    REQUIRE(c0.coeff.pi_power == 1);
    REQUIRE(c0.power == 0);

    CHECK_THROWS_AS(b2_image_monomial(-1, 0, eps), ConfigError);
    CHECK_THROWS_AS(b2_image_monomial(0, 0, Rat(1)), ConfigError);

    // numeric oracle: quadrature of the defining integral
    //   int_{eps<|v|<1} v^a conj(v)^b (1 - w conj(v))^-2 dA(v)
    auto numeric = [](int a, int b, double cutoff, std::complex<double> w) {
        int nth = 256, nr = 512;
        std::complex<double> acc = 0.0;
        double hr = (1.0 - cutoff) / nr;
        for (int i = 0; i <= nr; ++i) {
            double r = cutoff + i * hr;
            double wr = (i == 0 || i == nr) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            std::complex<double> ring = 0.0;
            for (int j = 0; j < nth; ++j) {
                double th = 2 * kPi * j / nth;
                std::complex<double> v = std::polar(r, th);
                std::complex<double> den = 1.0 - w * std::conj(v);
                ring += std::pow(v, a) * std::pow(std::conj(v), b) / (den * den);
            }
            acc += wr * ring * (2 * kPi / nth) * r;
        }
        return acc * hr / 3.0;
    };
    std::complex<double> w{0.4, 0.2};
    for (auto [a, b] : std::vector<std::pair<int, int>>{{1, 0}, {2, 1}, {0, 0}, {1, 2}}) {
        ExactTerm1C img = b2_image_monomial(a, b, eps);
        std::complex<double> closed =
            img.is_zero() ? 0.0 : img.coeff.to_complex() * std::pow(w, img.power);
        std::complex<double> got = numeric(a, b, 0.3, w);
        CHECK(std::abs(got - closed) < 1e-8);
    }
}

TEST_CASE("inner products vanish across rotation classes") {
    ExactComplex z = inner_product_hartogs(mono(1, 1, 0, 0, 0), mono(1, 0, 1, 0, 0));
    CHECK(z.is_zero());
    CHECK(inner_product_hartogs(mono(1, 2, 0, 0, 0), mono(1, 1, 1, 0, 0)).is_zero());

    // <z1 conj(z2), z1 conj(z2)> = pi^2 / 8
    ExactComplex n = inner_product_hartogs(mono(1, 1, 0, 0, 1), mono(1, 1, 0, 0, 1));
    REQUIRE(n.q == GaussianRational(Rat(1) / 8));
    REQUIRE(n.pi_power == 2);

    // sesquilinearity: <f, i g> = -i <f, g>
    SymbolicFunction f = SymbolicFunction::monomial(1, 1, 0, 0, 0) +
                         SymbolicFunction::monomial(1, 0, 1, 0, 0);
    SymbolicFunction g = SymbolicFunction::monomial(1, 1, 0, 0, 0) -
                         SymbolicFunction::monomial(1, 0, 1, 0, 0);
    ExactComplex fg = inner_product_hartogs(f, g);
    // |z1|^2 - |z2|^2 integrates to pi^2/6 - pi^2/3
    REQUIRE(fg.q == GaussianRational(Rat(-1) / 6));
    REQUIRE(fg.pi_power == 2);
    ExactComplex fig = inner_product_hartogs(f, g.scaled(gr_i()));
    REQUIRE(fig.q == GaussianRational(Rat(0), Rat(1) / 6));
    ExactComplex gf = inner_product_hartogs(g, f);
    REQUIRE(gf.q == fg.q.conj());
}

TEST_CASE("projection is idempotent and self-adjoint") {
    SymbolicFunction f = SymbolicFunction::monomial(1, 0, 0, 0, 1)           // conj(z2)
                         + SymbolicFunction::monomial(1, 1, 0, 1, 0)         // |z1|^2
                         + SymbolicFunction::monomial(GaussianRational(Rat(1), Rat(1)), 2, 0, 0, 1)
                         + SymbolicFunction::constant(Rat(3));
    SymbolicFunction g = SymbolicFunction::monomial(1, 0, -1, 0, 0)          // 1/z2
                         + SymbolicFunction::monomial(1, 1, 0, 0, 0)         // z1
                         + SymbolicFunction::monomial(GaussianRational(Rat(0), Rat(2)), 0, 1, 0, 2);

    SymbolicFunction pf = project_hartogs(f);
    CHECK(project_hartogs(pf) == pf);
    SymbolicFunction pg = project_hartogs(g);
    CHECK(project_hartogs(pg) == pg);

    // every output term is an admissible holomorphic monomial
    for (const Monomial& m : pf.terms()) {
        CHECK(m.c == 0);
        CHECK(m.d == 0);
        CHECK(admissible_hartogs(m.a, m.b));
    }

    // <Bf, g> == <f, Bg>
    CHECK(ec_equal(inner_product_hartogs(pf, g), inner_product_hartogs(f, pg)));
    CHECK(ec_equal(inner_product_hartogs(pf, f), inner_product_hartogs(f, pf)));
    // <Bf, Bg> == <Bf, g> (projection absorbs on the other side)
    CHECK(ec_equal(inner_product_hartogs(pf, pg), inner_product_hartogs(pf, g)));

    // truncated projection agrees with term-by-term truncated projection
    Rat eps = Rat(1) / 4;
    SymbolicFunction pft = project_hartogs(f, eps);
    for (const Monomial& m : pft.terms()) CHECK(admissible_hartogs(m.a, m.b));
    SymbolicFunction expect;
    for (const Monomial& m : f.terms()) {
        ExactTerm t = project_monomial_hartogs(m, eps);
        if (t.is_zero()) continue;
        REQUIRE(t.coeff.pi_power == 0);
        expect = expect + SymbolicFunction::monomial(t.coeff.q, t.alpha, t.beta, 0, 0);
    }
    CHECK(pft == expect);
}
