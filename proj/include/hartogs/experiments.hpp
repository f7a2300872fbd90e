#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hartogs/quadrature.hpp"
#include "hartogs/symbolic.hpp"

namespace hartogs {

// Grid parameters as data, so a probe can rebuild the same grid refined or
// with a different inner cutoff.
struct GridSpec {
    Domain domain = Domain::Hartogs;
    int radial_cells = 16;
    int angular_count = 12;
    int gauss_order = 4;
    double eps_min = 1e-5;
    double grading = 0.5;

    QuadGrid build() const;
    GridSpec doubled() const;          // radial_cells and angular_count x2
    GridSpec with_eps(double eps) const;
};

// Deterministic 64-bit generator; all experiment randomness flows through
// this so reports are reproducible byte-for-byte from the seed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ull) {}
    std::uint64_t next();
    double unit();                 // [0,1)
    int range(int lo, int hi);     // inclusive
  private:
    std::uint64_t state_;
};

// A reproducible family of test functions plus the recipe that generated it.
struct TestFamily {
    std::vector<SymbolicFunction> functions;
    std::uint64_t seed = 0;
    int degree_cap = 4;
    std::optional<double> truncation_radius;  // set for z2bar * indicator families

    // `count` random polynomials in z1, z2, conj(z1), conj(z2) with total
    // degree <= degree_cap and small rational coefficients. Every function
    // gets at least one antiholomorphic factor so the projection acts
    // nontrivially.
    static TestFamily random_polynomials(std::uint64_t seed, int count,
                                         int degree_cap, int terms_per_fn);

    // One-slot variant in w, conj(w) (second symbolic slot) for the
    // punctured-disc operators.
    static TestFamily random_disc_polynomials(std::uint64_t seed, int count,
                                              int degree_cap, int terms_per_fn);
};

struct RatioEntry {
    std::string function;      // printable form of the source function
    double source_norm = 0.0;
    double image_norm = 0.0;
    double ratio = 0.0;
};

struct RatioReport {
    int k = 0;
    double p = 2.0;
    double weight_exponent = 0.0;  // s = k*p
    std::vector<RatioEntry> entries;
    double max_ratio = 0.0;
    double median_ratio = 0.0;
    std::string grid_fingerprint;
    std::string refined_fingerprint;  // set when a stability pass ran
    double max_ratio_refined = 0.0;   // max ratio on the doubled grid
    double stability = 0.0;           // |max - max_refined| / max
};

enum class Verdict { Bounded, LogDivergent, PowerDivergent };

std::string verdict_tag(Verdict v);

struct DivergenceReport {
    std::vector<double> cutoffs;   // strictly decreasing
    std::vector<double> values;    // measured quantity per cutoff
    double log_slope = 0.0;        // b in v ~ a + b*log(1/eps)
    double fit_residual = 0.0;     // rms residual of the log fit / mean |v|
    Verdict verdict = Verdict::Bounded;
};

// Fit values against log(1/eps) and classify the trend. A flat fit
// (relative slope < 1e-3) or a non-increasing tail is Bounded. Otherwise the
// ratios of successive per-interval slopes are normalized to a per-decade
// contraction rate: all below 0.9 is Bounded, all above 1.1 is
// PowerDivergent, anything between (log growth has ratio 1) is LogDivergent.
// Tails contracting slower than 0.9 per decade are reported LogDivergent;
// resolving them needs a wider cutoff range than doubles allow.
DivergenceReport classify_divergence(const std::vector<double>& cutoffs,
                                     const std::vector<double>& values);

// ---------------------------------------------------------------------------
// Probes
// ---------------------------------------------------------------------------

// Ratio ||B f||_{k,p,kp} / ||f||_{k,p} (weighted image norm over unweighted
// source norm) across a family, with a stability
// pass on the doubled grid. Sources with non-finite norms are rejected.
RatioReport probe_main_estimate(int k, double p, const TestFamily& family,
                                const GridSpec& grid, bool stability_pass = true);

// Same ratios for several (k, p) pairs in one sweep over each grid; the
// outputs match probe_main_estimate entry for entry.
std::vector<RatioReport> probe_estimate_matrix(const std::vector<int>& ks,
                                               const std::vector<double>& ps,
                                               const TestFamily& family,
                                               const GridSpec& grid,
                                               bool stability_pass = true);

struct CounterexampleReport {
    int k = 0;
    double p = 0.0;
    DivergenceReport total;      // full ||.||_{k,p,kp}^p trend
    DivergenceReport top_level;  // top seminorm integral trend
    std::string function;        // the fixed image c/z2
};

// Trend of || (1/2)/z2 ||_{k,p,kp} over H intersect {|z2| > eps} as eps
// shrinks; this is the exact projection of conj(z2), so a divergent trend
// certifies unboundedness at that (k, p).
CounterexampleReport probe_counterexample(int k, double p,
                                          const std::vector<double>& cutoffs,
                                          const GridSpec& grid);

struct WindowEntry {
    double p = 0.0;
    double max_ratio = 0.0;          // polynomial family, plain L^p (k=0)
    DivergenceReport image_trend;    // ||B(conj(z2) 1_{|z2|>eps})||_p trend
    Verdict verdict = Verdict::Bounded;
    bool inside_window = false;      // 4/3 < p < 4
};

struct WindowReport {
    std::vector<WindowEntry> entries;
    std::string grid_fingerprint;
};

// L^p behaviour across a list of exponents: polynomial-family ratios stay
// tame inside (4/3, 4) while the truncated-conj(z2) image norm diverges at
// p >= 4. The lower endpoint is probed by the same trend and reported, not
// asserted.
WindowReport probe_lp_window(const std::vector<double>& p_list,
                             const GridSpec& grid, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Identity checks
// ---------------------------------------------------------------------------

struct IdentityReport {
    std::string name;
    int cases = 0;
    double max_abs_residual = 0.0;  // relative where the quantity is float
    bool exact = false;             // true when compared in rational arithmetic
};

// d^b/dw^b K == (etabar/w)^b d^b/detabar^b K for the weighted punctured-disc
// kernel, b <= b_max, at seeded sample pairs; both sides are exact
// expressions evaluated in floating point.
IdentityReport verify_kernel_identity(int b_max, int sample_count,
                                      std::uint64_t seed);

// Integration by parts: for the weighted punctured-disc kernel K and a
// polynomial f on the disc slot,
//   int d^b_w K(w,eta) f(eta) |eta|^2 dA
//     == (1/w^b) sum_j (-1)^j d_j int K(w,eta) (T^j f)(eta) |eta|^2 dA
// where etabar^b d^b_etabar = sum_j d_j T^j. Both sides by quadrature.
IdentityReport verify_ibp(int b, const SymbolicFunction& f, std::complex<double> w2,
                          const GridSpec& grid);

struct LemmaB2Report {
    double p = 0.0;
    RatioReport polynomial_face;      // unnormalized disc-kernel operator on
                                      // L^p(D*, |w|^{2-p}), polynomial family
    DivergenceReport sharp_literal;   // ||c_eps / w||^p with weight |w|^{2-p}
    DivergenceReport sharp_weighted;  // same image measured against |w|^2
};

// Two faces of the punctured-disc lemma: the operator stays bounded on
// polynomials in the |w|^{2-p}-weighted norm, while the weighted projection
// image of conj(w) 1_{|w|>eps}, namely c_eps/w, has divergent norm at p = 4
// (power-type against the lemma weight, log-type against |w|^2).
LemmaB2Report verify_lemma_b2(double p, const TestFamily& family,
                              const GridSpec& grid);

// Exact operator-transfer equivalence for all |beta| <= beta_max on a lattice
// of monomials and rational sample points.
IdentityReport verify_transfer_exact(int beta_max);

// Exact checks of the tangential-power coefficients: the falling-factorial
// identity for b <= b_max, m <= m_max, plus round-trip through the inverse
// expansion.
IdentityReport verify_tangential(int b_max, int m_max);

}  // namespace hartogs
