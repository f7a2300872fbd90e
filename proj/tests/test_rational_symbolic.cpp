#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "hartogs/errors.hpp"
#include "hartogs/multi_index.hpp"
#include "hartogs/rational.hpp"
#include "hartogs/symbolic.hpp"

using namespace hartogs;

namespace {
GaussianRational gr(long re_num, long re_den, long im_num = 0, long im_den = 1) {
    return {Rat(re_num) / re_den, Rat(im_num) / im_den};
}
}  // namespace

TEST_CASE("rational powers and parsing") {
    CHECK(rat_pow(Rat(2) / 3, 3) == Rat(8) / 27);
    CHECK(rat_pow(Rat(2) / 3, 0) == 1);
    CHECK(rat_pow(Rat(2) / 3, -2) == Rat(9) / 4);
    CHECK_THROWS_AS(rat_pow(Rat(0), -1), SingularPointError);

    CHECK(parse_rat("3/4") == Rat(3) / 4);
    CHECK(parse_rat("-7") == Rat(-7));
    CHECK(parse_rat("-2/6") == Rat(-1) / 3);
    CHECK_THROWS_AS(parse_rat("1/0"), ConfigError);
    CHECK_THROWS_AS(parse_rat("x"), ConfigError);
    CHECK_THROWS_AS(parse_rat(""), ConfigError);

    CHECK(rat_to_string(Rat(-5) / 10) == "-1/2");
    CHECK(rat_to_string(Rat(4)) == "4");
}

TEST_CASE("Gaussian rational field operations") {
    GaussianRational a = gr(1, 2, 1, 3);   // 1/2 + i/3
    GaussianRational b = gr(-2, 1, 1, 1);  // -2 + i

    CHECK((a + b) == gr(-3, 2, 4, 3));
    CHECK((a * b) == GaussianRational{Rat(1) / 2 * -2 - Rat(1) / 3, Rat(1) / 2 + Rat(-2) / 3});
    CHECK((a / a) == GaussianRational{Rat(1), Rat(0)});
    CHECK((b / a * a) == b);
    CHECK_THROWS_AS(a / GaussianRational{}, SingularPointError);

    // i^2 = -1, i^-1 = -i
    CHECK(gr_pow(gr_i(), 2) == GaussianRational{Rat(-1), Rat(0)});
    CHECK(gr_pow(gr_i(), -1) == GaussianRational{Rat(0), Rat(-1)});
    CHECK(gr_pow(b, 3) == b * b * b);
    CHECK(gr_pow(b, -2) * b * b == GaussianRational{Rat(1), Rat(0)});

    CHECK(a.conj().im == -a.im);
    CHECK(a.norm_sq() == Rat(1) / 4 + Rat(1) / 9);
    CHECK(gr(3, 4).magnitude_bound() == Rat(3) / 4);
    CHECK(gr(-3, 4, 1, 2).magnitude_bound() == Rat(3) / 4 + Rat(1) / 2);
}

TEST_CASE("exact scalars carry pi powers") {
    ExactScalar s{Rat(3) / 4, 2};
    CHECK(s.to_double() == doctest::Approx(0.75 * M_PI * M_PI).epsilon(1e-15));
    ExactScalar t{Rat(2), -1};
    CHECK((s * t).q == Rat(3) / 2);
    CHECK((s * t).pi_power == 1);

    ExactComplex c{gr(1, 2), 1};
    ExactComplex d{gr(0, 1, 1, 1), -1};  // i / pi
    ExactComplex prod = ec_mul(c, d);
    CHECK(prod.q == gr(0, 1, 1, 2));
    CHECK(prod.pi_power == 0);
    ExactComplex quot = ec_div(c, d);
    CHECK(quot.pi_power == 2);
    CHECK(ec_mul(quot, d).q == c.q);

    CHECK(ec_add(ExactComplex{}, c).q == c.q);
    CHECK(ec_add(c, c).q == gr(1, 1));
    CHECK_THROWS_AS(ec_add(c, d), SingularPointError);  // mismatched pi powers
}

TEST_CASE("multi index enumeration") {
    // 4-slot indices of depth <= 2: C(4+2-1, ...) layered; count levels
    auto all = multi_indices_up_to(2);
    int level0 = 0, level1 = 0, level2 = 0;
    for (const MultiIndex4& m : all) {
        int t = m.a1 + m.a2 + m.a1c + m.a2c;
        if (t == 0) ++level0;
        if (t == 1) ++level1;
        if (t == 2) ++level2;
    }
    CHECK(level0 == 1);
    CHECK(level1 == 4);
    CHECK(level2 == 10);
    CHECK(all.size() == 15);

    CHECK(bi_indices_up_to(2).size() == 6);
    CHECK(bi_indices_up_to(4).size() == 15);
}

TEST_CASE("symbolic monomials and arithmetic") {
    SymbolicFunction f = SymbolicFunction::monomial(gr(2, 1), 1, 2, 0, 1);
    SymbolicFunction g = SymbolicFunction::monomial(gr(1, 1), 1, 2, 0, 1);
    SymbolicFunction sum = f + g;
    REQUIRE(sum.terms().size() == 1);
    CHECK(sum.terms()[0].coeff == gr(3, 1));

    CHECK((f - f).is_zero());
    CHECK(SymbolicFunction::zero().is_zero());
    CHECK_FALSE(f.is_zero());
    CHECK(f.uses_slot1());
    CHECK_FALSE(SymbolicFunction::monomial(gr(1, 1), 0, 3, 0, 1).uses_slot1());

    SymbolicFunction prod = f * g;
    REQUIRE(prod.terms().size() == 1);
    CHECK(prod.terms()[0].a == 2);
    CHECK(prod.terms()[0].b == 4);
    CHECK(prod.terms()[0].d == 2);
    CHECK(prod.terms()[0].coeff == gr(2, 1));

    CHECK(f.scaled(gr(1, 2)).terms()[0].coeff == gr(1, 1));
}

TEST_CASE("symbolic derivatives follow the Wirtinger rules") {
    // f = z1^2 z2^-1 conj(z2)^3
    SymbolicFunction f = SymbolicFunction::monomial(gr(1, 1), 2, -1, 0, 3);

    SymbolicFunction d1 = f.derivative(Var::V1);
    REQUIRE(d1.terms().size() == 1);
    CHECK(d1.terms()[0].coeff == gr(2, 1));
    CHECK(d1.terms()[0].a == 1);

    SymbolicFunction d2 = f.derivative(Var::V2);
    REQUIRE(d2.terms().size() == 1);
    CHECK(d2.terms()[0].coeff == gr(-1, 1));
    CHECK(d2.terms()[0].b == -2);

    SymbolicFunction d2b = f.derivative(Var::V2Bar);
    REQUIRE(d2b.terms().size() == 1);
    CHECK(d2b.terms()[0].coeff == gr(3, 1));
    CHECK(d2b.terms()[0].d == 2);

    CHECK(f.derivative(Var::V1Bar).is_zero());

    // derivative of a conjugate mirrors the slots
    SymbolicFunction fc = f.conjugate();
    REQUIRE(fc.terms().size() == 1);
    CHECK(fc.terms()[0].c == 2);
    CHECK(fc.terms()[0].b == 3);
    CHECK(fc.terms()[0].d == -1);
    CHECK(fc.derivative(Var::V1).is_zero());
}

TEST_CASE("exact evaluation agrees with floating evaluation") {
    SymbolicFunction f =
        SymbolicFunction::monomial(gr(1, 2, 1, 3), 1, -2, 2, 1) +
        SymbolicFunction::monomial(gr(-3, 1), 0, 1, 0, 1);
    GaussianRational v1 = gr(1, 3, -1, 4);
    GaussianRational v2 = gr(1, 2, 1, 5);

    GaussianRational exact = f.eval_exact(v1, v2);
    cd approx = f.eval(v1.to_complex(), v2.to_complex());
    CHECK(std::abs(exact.to_complex() - approx) < 1e-14);

    // conjugate slots really are conjugates of the values
    SymbolicFunction just_conj = SymbolicFunction::monomial(gr(1, 1), 0, 0, 1, 0);
    CHECK(just_conj.eval_exact(v1, v2) == v1.conj());

    CHECK_THROWS_AS(SymbolicFunction::monomial(gr(1, 1), 0, -1, 0, 0)
                        .eval_exact(v1, GaussianRational{}),
                    SingularPointError);
}

TEST_CASE("compose with the product map substitutes z1 = w1 w2, z2 = w2") {
    // z1^2 conj(z2) -> (w1 w2)^2 conj(w2)
    SymbolicFunction f = SymbolicFunction::monomial(gr(1, 1), 2, 0, 0, 1);
    SymbolicFunction fp = f.compose_psi();
    REQUIRE(fp.terms().size() == 1);
    CHECK(fp.terms()[0].a == 2);
    CHECK(fp.terms()[0].b == 2);
    CHECK(fp.terms()[0].d == 1);

    // conj(z1) z2^-1 -> conj(w1 w2) w2^-1
    SymbolicFunction h = SymbolicFunction::monomial(gr(1, 1), 0, -1, 1, 0);
    SymbolicFunction hp = h.compose_psi();
    REQUIRE(hp.terms().size() == 1);
    CHECK(hp.terms()[0].b == -1);
    CHECK(hp.terms()[0].c == 1);
    CHECK(hp.terms()[0].d == 1);

    GaussianRational w1 = gr(1, 3), w2 = gr(-1, 2, 1, 3);
    CHECK(fp.eval_exact(w1, w2) == f.eval_exact(w1 * w2, w2));
}

TEST_CASE("power tables evaluate compiled functions") {
    SymbolicFunction f =
        SymbolicFunction::monomial(gr(2, 3), 1, -2, 1, 1) +
        SymbolicFunction::monomial(gr(0, 1, 1, 1), 0, 3, 0, 0);
    CompiledFunction cf = CompiledFunction::from(f);
    PowerTables t;
    cd v1{0.3, -0.2}, v2{0.5, 0.4};
    t.build(v1, v2, cf.bounds);
    CHECK(std::abs(cf.eval(t) - f.eval(v1, v2)) < 1e-15);

    // bounds include both slots' extremes
    ExponentBounds b = f.bounds();
    CHECK(b.lo2 <= -2);
    CHECK(b.hi2 >= 3);
}

TEST_CASE("string rendering is stable") {
    SymbolicFunction f = SymbolicFunction::monomial(gr(-1, 2), 1, 0, 0, 2);
    CHECK(f.to_string() == "(-1/2)*v1*v2~^2");
    CHECK(SymbolicFunction::zero().to_string() == "0");
}
