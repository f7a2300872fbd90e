#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <json.hpp>
#include <vector>

#include "hartogs/errors.hpp"
#include "hartogs/multi_index.hpp"
#include "hartogs/operator_calculus.hpp"
#include "hartogs/rational.hpp"
#include "hartogs/symbolic.hpp"

using namespace hartogs;

namespace {

GaussianRational gr(long n, long d = 1) { return {Rat(n) / d, Rat(0)}; }

// Independent oracles: Stirling numbers by their defining recurrences.
// S2(n, k): subset numbers,  S2(n,k) = k S2(n-1,k) + S2(n-1,k-1).
std::vector<std::vector<Rat>> stirling_second(int n_max) {
    std::vector<std::vector<Rat>> s(n_max + 1, std::vector<Rat>(n_max + 1, Rat(0)));
    s[0][0] = 1;
    for (int n = 1; n <= n_max; ++n)
        for (int k = 1; k <= n; ++k) s[n][k] = Rat(k) * s[n - 1][k] + s[n - 1][k - 1];
    return s;
}

// signed Stirling numbers of the first kind: s(n,k) with
// s(n,k) = s(n-1,k-1) - (n-1) s(n-1,k).
std::vector<std::vector<Rat>> stirling_first_signed(int n_max) {
    std::vector<std::vector<Rat>> s(n_max + 1, std::vector<Rat>(n_max + 1, Rat(0)));
    s[0][0] = 1;
    for (int n = 1; n <= n_max; ++n)
        for (int k = 1; k <= n; ++k) s[n][k] = s[n - 1][k - 1] - Rat(n - 1) * s[n - 1][k];
    return s;
}

Rat falling(int m, int j) {
    Rat out(1);
    for (int i = 0; i < j; ++i) out *= Rat(m - i);
    return out;
}

SymbolicFunction mono(long num, long den, int a, int b, int c, int d) {
    return SymbolicFunction::monomial({Rat(num) / den, Rat(0)}, a, b, c, d);
}

}  // namespace

TEST_CASE("poly1 basics") {
    Poly1 p({gr(1), gr(-2), gr(3)});  // 1 - 2x + 3x^2
    CHECK(p.degree() == 2);
    CHECK(p.derivative().coeffs() == std::vector<GaussianRational>{gr(-2), gr(6)});
    CHECK(p.times_x().coeffs() == std::vector<GaussianRational>{gr(0), gr(1), gr(-2), gr(3)});
    CHECK(p.eval_exact(gr(1, 2)) == gr(3, 4));
    CHECK(std::abs(p.eval({0.5, 0.0}) - cd(0.75, 0.0)) < 1e-15);
    CHECK(p.plus(p.scaled(gr(-1))).is_zero());
    CHECK(p.sup_bound() == Rat(6));
}

TEST_CASE("first order transfer operators match the chain rule") {
    // d_z1 pulled through z = (w1 w2, w2) is (1/w2) d_w1: on f = w1 w2
    // (that is z1 composed with the map) it returns 1.
    WOperator op10 = transfer_dz({1, 0});
    SymbolicFunction z1_psi = mono(1, 1, 1, 1, 0, 0);  // w1 w2
    GaussianRational w1 = gr(2, 5), w2 = gr(-3, 7);
    CHECK(apply_woperator(op10, z1_psi, w1, w2) == gr(1));

    // d_z2 on the same function vanishes identically.
    WOperator op01 = transfer_dz({0, 1});
    CHECK(apply_woperator(op01, z1_psi, w1, w2) == gr(0));

    // mixed second derivative of z1^2 z2 is 2 z1; at w = (1/2, 1/2),
    // z = Psi(w) = (1/4, 1/2), the value is 1/2.
    WOperator op11 = transfer_dz({1, 1});
    SymbolicFunction f = mono(1, 1, 2, 3, 0, 0);  // (w1 w2)^2 w2 = w1^2 w2^3
    CHECK(apply_woperator(op11, f, gr(1, 2), gr(1, 2)) == gr(1, 2));
}

TEST_CASE("transfer operators reproduce z-side derivatives of monomials") {
    std::vector<GaussianRational> w1s = {gr(1, 3), gr(-2, 5), {Rat(1) / 4, Rat(1) / 3}};
    std::vector<GaussianRational> w2s = {gr(1, 2), {Rat(-1) / 3, Rat(2) / 5}, gr(3, 4)};
    for (int m = 0; m <= 3; ++m) {
        for (int n = -2; n <= 2; ++n) {
            SymbolicFunction g = SymbolicFunction::monomial(gr(1), m, n, 0, 0);
            SymbolicFunction gpsi = g.compose_psi();
            for (MultiIndex2 beta : bi_indices_up_to(3)) {
                SymbolicFunction dg = g;
                for (int i = 0; i < beta.b1; ++i) dg = dg.derivative(Var::V1);
                for (int i = 0; i < beta.b2; ++i) dg = dg.derivative(Var::V2);
                SymbolicFunction dg_psi = dg.compose_psi();
                for (std::size_t ip = 0; ip < w1s.size(); ++ip) {
                    GaussianRational lhs =
                        apply_woperator(transfer_dz(beta), gpsi, w1s[ip], w2s[ip]);
                    GaussianRational rhs = dg_psi.eval_exact(w1s[ip], w2s[ip]);
                    REQUIRE(lhs == rhs);
                }
            }
        }
    }
}

TEST_CASE("both composition orders build the same operator") {
    for (MultiIndex2 beta : bi_indices_up_to(4)) {
        WOperator a = transfer_dz(beta);
        WOperator b = transfer_dz_z1_first(beta);
        REQUIRE(a.order == b.order);
        REQUIRE(a.terms.size() == b.terms.size());
        for (const auto& [key, poly] : a.terms) {
            auto it = b.terms.find(key);
            REQUIRE(it != b.terms.end());
            CHECK(poly.coeffs() == it->second.coeffs());
        }
    }
}

TEST_CASE("coefficient polynomials stay uniformly bounded per order") {
    // sup bounds over the closed disc: finite, and the max over |beta| <= k
    // is nondecreasing in k
    double prev = 0.0;
    for (int k = 0; k <= 3; ++k) {
        double worst = 0.0;
        for (MultiIndex2 beta : bi_indices_up_to(k)) {
            double b = coeff_sup_bound(transfer_dz(beta));
            CHECK(std::isfinite(b));
            worst = std::max(worst, b);
        }
        CHECK(worst >= prev);
        prev = worst;
    }
    CHECK(coeff_sup_bound_exact(transfer_dz({0, 0})) == Rat(1));
}

TEST_CASE("operator tables serialize to well formed json") {
    auto doc = nlohmann::json::parse(transfer_dz({1, 1}).to_json());
    CHECK(doc.at("order") == 2);
    const auto& terms = doc.at("terms");
    CHECK(terms.is_object());
    // every key is "a,b" with a + b <= order; coefficients are rational
    // 4-tuples [re_num, re_den, im_num, im_den]
    for (const auto& [key, val] : terms.items()) {
        auto comma = key.find(',');
        REQUIRE(comma != std::string::npos);
        int a = std::stoi(key.substr(0, comma));
        int b = std::stoi(key.substr(comma + 1));
        CHECK(a + b <= 2);
        CHECK(val.at("w2_exponent") == b - 2);
        for (const auto& c : val.at("coeffs")) {
            REQUIRE(c.is_array());
            REQUIRE(c.size() == 4);
            CHECK(c[1].get<long long>() != 0);
            CHECK(c[3].get<long long>() != 0);
        }
    }
}

TEST_CASE("tangential power coefficients are scaled subset numbers") {
    // T^b on antiholomorphic functions expands through the Euler operator:
    // coefficient of conj(w)^j d^j is (i/2)^b S2(b, j).
    auto S2 = stirling_second(8);
    for (int b = 0; b <= 8; ++b) {
        TangentialForm form = tangential_power(b);
        REQUIRE(form.order == b);
        REQUIRE(form.c.size() == static_cast<std::size_t>(b) + 1);
        GaussianRational scale = gr_pow({Rat(0), Rat(1) / 2}, b);  // (i/2)^b
        for (int j = 0; j <= b; ++j) {
            CHECK(form.c[static_cast<std::size_t>(j)] == scale * GaussianRational{S2[b][j]});
        }
    }
}

TEST_CASE("inverse expansion uses signed cycle numbers") {
    // conj(w)^b d^b = sum_j s(b, j) (-2i)^j T^j
    auto s1 = stirling_first_signed(8);
    for (int b = 0; b <= 8; ++b) {
        std::vector<GaussianRational> d = tangential_expansion(b);
        REQUIRE(d.size() == static_cast<std::size_t>(b) + 1);
        for (int j = 0; j <= b; ++j) {
            GaussianRational expect = GaussianRational{s1[b][j]} * gr_pow({Rat(0), Rat(-2)}, j);
            CHECK(d[static_cast<std::size_t>(j)] == expect);
        }
    }
    // round trip: applying the forward forms with the inverse coefficients
    // recovers the falling factorial on every monomial symbol
    for (int b = 0; b <= 8; ++b) {
        std::vector<GaussianRational> d = tangential_expansion(b);
        for (int m = 0; m <= 12; ++m) {
            GaussianRational acc{};
            for (int j = 0; j <= b; ++j) {
                // T^j on conj(w)^m multiplies by (i m / 2)^j
                acc += d[static_cast<std::size_t>(j)] * gr_pow({Rat(0), Rat(m) / 2}, j);
            }
            CHECK(acc == GaussianRational{falling(m, b)});
        }
    }
}

TEST_CASE("falling factorial identity for tangential powers") {
    // sum_j c_j m^(j) = (i m / 2)^b: the action of T^b on conj(w)^m
    for (int b = 0; b <= 8; ++b) {
        TangentialForm form = tangential_power(b);
        for (int m = 0; m <= 12; ++m) {
            GaussianRational acc{};
            for (int j = 0; j <= b; ++j)
                acc += form.c[static_cast<std::size_t>(j)] * GaussianRational{falling(m, j)};
            CHECK(acc == gr_pow({Rat(0), Rat(m) / 2}, b));
        }
    }
}

TEST_CASE("tangential operator acts symbolically and matches the forms") {
    // f = conj(w)^3: T f = -(1/2i) * 3 conj(w)^3 = (3i/2) conj(w)^3
    SymbolicFunction f = mono(1, 1, 0, 0, 0, 3);
    SymbolicFunction tf = tangential_raw(f, 2);
    REQUIRE(tf.terms().size() == 1);
    CHECK(tf.terms()[0].coeff == GaussianRational{Rat(0), Rat(3) / 2});

    // mixed symbol: T(w^a conj(w)^d) = (i(d - a)/2) w^a conj(w)^d
    SymbolicFunction h = mono(1, 1, 0, 2, 0, 5);
    SymbolicFunction th = tangential_raw(h, 2);
    REQUIRE(th.terms().size() == 1);
    CHECK(th.terms()[0].coeff == GaussianRational{Rat(0), Rat(3) / 2});

    // the expanded power agrees with iterated application
    GaussianRational w{Rat(1) / 3, Rat(-2) / 7};
    SymbolicFunction iter = f;
    for (int b = 1; b <= 4; ++b) {
        iter = tangential_raw(iter, 2);
        CHECK(apply_tangential(tangential_power(b), f, w) == iter.eval_exact(GaussianRational{}, w));
    }
}

TEST_CASE("tangential field is tangent to every circle") {
    for (double rho : {0.1, 0.45, 0.99}) {
        for (double theta : {0.0, 0.7, 2.1, 3.9, 6.2}) {
            CHECK(check_tangency(rho, theta) == 0.0);
        }
    }
}

TEST_CASE("transfer rejects negative orders") {
    CHECK_THROWS_AS(transfer_dz({-1, 0}), ConfigError);
    CHECK_THROWS_AS(apply_woperator(transfer_dz({1, 0}), mono(1, 1, 0, 1, 0, 0),
                                    gr(1, 3), GaussianRational{}),
                    SingularPointError);
}
