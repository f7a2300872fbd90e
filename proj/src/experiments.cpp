#include "hartogs/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "hartogs/errors.hpp"
#include "hartogs/kernels.hpp"
#include "hartogs/monomial_engine.hpp"
#include "hartogs/operator_calculus.hpp"

namespace hartogs {

QuadGrid GridSpec::build() const {
    return build_grid(domain, radial_cells, angular_count, eps_min, grading, gauss_order);
}

GridSpec GridSpec::doubled() const {
    GridSpec g = *this;
    g.radial_cells *= 2;
    g.angular_count *= 2;
    return g;
}

GridSpec GridSpec::with_eps(double eps) const {
    GridSpec g = *this;
    g.eps_min = eps;
    return g;
}

// splitmix64: tiny, seedable, identical on every platform.
std::uint64_t Rng::next() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double Rng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

int Rng::range(int lo, int hi) {
    if (hi < lo) throw ConfigError("Rng::range: empty range");
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next() % span);
}

TestFamily TestFamily::random_polynomials(std::uint64_t seed, int count, int degree_cap,
                                          int terms_per_fn) {
    if (count <= 0 || terms_per_fn <= 0) throw ConfigError("random_polynomials: empty family");
    if (degree_cap < 1) throw ConfigError("random_polynomials: degree cap must be >= 1");
    TestFamily fam;
    fam.seed = seed;
    fam.degree_cap = degree_cap;
    Rng rng(seed);
    auto coeff = [&rng]() {
        int num = rng.range(-9, 9);
        if (num == 0) num = 1;
        GaussianRational c{Rat(num) / rng.range(1, 4), Rat(0)};
        if (rng.range(0, 3) == 0) c.im = Rat(rng.range(-9, 9)) / rng.range(1, 4);
        return c;
    };
    auto exponents = [&](int min_anti) {
        for (;;) {
            int a = rng.range(0, degree_cap), b = rng.range(0, degree_cap);
            int c = rng.range(0, degree_cap), d = rng.range(min_anti, degree_cap);
            if (a + b + c + d <= degree_cap) return Monomial{GaussianRational{}, a, b, c, d};
        }
    };
    while (static_cast<int>(fam.functions.size()) < count) {
        std::vector<Monomial> terms;
        for (int t = 0; t < terms_per_fn; ++t) {
            // the first term always carries a conj(z2) factor, so the
            // projection acts nontrivially on every family member
            Monomial m = exponents(t == 0 ? 1 : 0);
            m.coeff = coeff();
            terms.push_back(m);
        }
        SymbolicFunction f{std::move(terms)};
        if (!f.is_zero()) fam.functions.push_back(std::move(f));
    }
    return fam;
}

TestFamily TestFamily::random_disc_polynomials(std::uint64_t seed, int count, int degree_cap,
                                               int terms_per_fn) {
    if (count <= 0 || terms_per_fn <= 0) throw ConfigError("random_disc_polynomials: empty family");
    if (degree_cap < 1) throw ConfigError("random_disc_polynomials: degree cap must be >= 1");
    TestFamily fam;
    fam.seed = seed;
    fam.degree_cap = degree_cap;
    Rng rng(seed);
    while (static_cast<int>(fam.functions.size()) < count) {
        std::vector<Monomial> terms;
        for (int t = 0; t < terms_per_fn; ++t) {
            int b, d;
            do {
                b = rng.range(0, degree_cap);
                d = rng.range(0, degree_cap);
            } while (b + d > degree_cap);
            int num = rng.range(-9, 9);
            if (num == 0) num = 1;
            GaussianRational c{Rat(num) / rng.range(1, 4), Rat(0)};
            if (rng.range(0, 3) == 0) c.im = Rat(rng.range(-9, 9)) / rng.range(1, 4);
            terms.push_back(Monomial{c, 0, b, 0, d});
        }
        SymbolicFunction f{std::move(terms)};
        if (!f.is_zero()) fam.functions.push_back(std::move(f));
    }
    return fam;
}

std::string verdict_tag(Verdict v) {
    switch (v) {
        case Verdict::Bounded: return "bounded";
        case Verdict::LogDivergent: return "log-divergent";
        case Verdict::PowerDivergent: return "power-divergent";
    }
    return "unknown";
}

DivergenceReport classify_divergence(const std::vector<double>& cutoffs,
                                     const std::vector<double>& values) {
    std::size_t n = cutoffs.size();
    if (n < 3 || values.size() != n)
        throw ConfigError("classify_divergence: need >= 3 matching cutoffs and values");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(cutoffs[i] > 0.0)) throw ConfigError("classify_divergence: cutoffs must be positive");
        if (i + 1 < n && !(cutoffs[i + 1] < cutoffs[i]))
            throw ConfigError("classify_divergence: cutoffs must be strictly decreasing");
        if (!std::isfinite(values[i]))
            throw EvaluationError("classify_divergence: non-finite value at cutoff " +
                                  std::to_string(cutoffs[i]));
    }
    DivergenceReport rep;
    rep.cutoffs = cutoffs;
    rep.values = values;

    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = -std::log(cutoffs[i]);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += values[i];
        sxx += x[i] * x[i];
        sxy += x[i] * values[i];
    }
    double dn = static_cast<double>(n);
    double denom = dn * sxx - sx * sx;
    double slope = (dn * sxy - sx * sy) / denom;
    double intercept = (sy - slope * sx) / dn;
    rep.log_slope = slope;

    double mean_abs = 0, rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_abs += std::abs(values[i]) / dn;
        double r = values[i] - (intercept + slope * x[i]);
        rss += r * r;
    }
    double scale = std::max(mean_abs, 1e-300);
    rep.fit_residual = std::sqrt(rss / dn) / scale;

    // per-interval slopes of value against log(1/eps)
    std::vector<double> s(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) s[i] = (values[i + 1] - values[i]) / (x[i + 1] - x[i]);

    // Plateau or decreasing values cannot diverge along this family.
    if (std::abs(slope) / scale < 1e-3 || s.back() <= 0.0) {
        rep.verdict = Verdict::Bounded;
        return rep;
    }
    // The ratio of successive per-interval slopes separates the tails this
    // probe meets: a contracting tail (integrable power r^(-1+delta)) keeps
    // the ratio at 10^(-delta) per decade, a logarithmic tail keeps it at 1,
    // and a divergent power tail inflates it. Values near 1 are reported as
    // log-divergent; tails contracting slower than 0.9 per decade are below
    // the resolution of three cutoffs and classify as log-divergent too.
    bool contracting = true, expanding = true;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        double prev = std::abs(s[i]) > 1e-300 ? s[i] : 1e-300;
        double raw = std::max(s[i + 1] / prev, 1e-300);
        // normalize to a per-decade contraction: x is ln(1/eps), so one
        // decade spans ln(10) in x
        double ratio = std::pow(raw, std::log(10.0) / (x[i + 2] - x[i + 1]));
        if (!(ratio < 0.9)) contracting = false;
        if (!(ratio > 1.1)) expanding = false;
    }
    if (contracting)
        rep.verdict = Verdict::Bounded;
    else if (expanding)
        rep.verdict = Verdict::PowerDivergent;
    else
        rep.verdict = Verdict::LogDivergent;
    return rep;
}

// ---------------------------------------------------------------------------
// Batched weighted-Sobolev norms: one grid sweep for many functions and many
// (k, p) pairs. Norm convention matches weighted_level_powers: p-th powers of
// the individual derivative norms are summed per level, then across levels
// <= k, weighted by delta^(k p).
// ---------------------------------------------------------------------------

namespace {

struct VecAcc {
    std::vector<double> v;
    VecAcc& operator+=(const VecAcc& o) {
        if (o.v.empty()) return *this;
        if (v.empty()) {
            v = o.v;
            return *this;
        }
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
        return *this;
    }
};

struct BatchPlan {
    struct EntryRef {
        const CompiledFunction* fn;
        int level;
    };
    std::vector<std::vector<EntryRef>> functions;  // nonzero entries per function
    ExponentBounds bounds;
    std::vector<SobolevParams> combos;
    std::vector<double> distinct_p;
    std::vector<PPow> pows;        // one per distinct p
    std::vector<std::size_t> pidx; // combo -> distinct p
    int max_level = 0;
};

BatchPlan make_plan(const std::vector<const FnBundle*>& bundles,
                    const std::vector<SobolevParams>& combos) {
    BatchPlan plan;
    plan.combos = combos;
    bool bounds_set = false;
    for (const FnBundle* b : bundles) {
        std::vector<BatchPlan::EntryRef> refs;
        for (const BundleEntry& e : b->entries) {
            if (e.compiled.entries.empty()) continue;
            refs.push_back({&e.compiled, e.level});
            plan.max_level = std::max(plan.max_level, e.level);
        }
        if (!bounds_set && !b->entries.empty()) {
            plan.bounds = b->bounds;
            bounds_set = true;
        } else {
            plan.bounds.merge(b->bounds);
        }
        plan.functions.push_back(std::move(refs));
    }
    for (const SobolevParams& c : combos) {
        if (c.k < 0 || !(c.p > 0.0)) throw ConfigError("batched norms: need k >= 0 and p > 0");
        std::size_t ip = 0;
        for (; ip < plan.distinct_p.size(); ++ip)
            if (plan.distinct_p[ip] == c.p) break;
        if (ip == plan.distinct_p.size()) {
            plan.distinct_p.push_back(c.p);
            plan.pows.emplace_back(c.p);
        }
        plan.pidx.push_back(ip);
    }
    return plan;
}

// Accumulated p-th powers S[f * n_combos + c]; norms are S^(1/p).
std::vector<double> run_batch(const BatchPlan& plan, const QuadGrid& g, int threads = -1) {
    std::size_t nf = plan.functions.size(), nc = plan.combos.size();
    std::size_t np = plan.distinct_p.size();
    std::size_t nl = static_cast<std::size_t>(plan.max_level) + 1;
    auto node_accumulate = [&](PowerTables& tables, double node_w,
                               const std::vector<double>& pow_s, std::vector<double>& out,
                               std::vector<double>& scratch) {
        // scratch: np * nl entry-power sums for the current function
        for (std::size_t f = 0; f < nf; ++f) {
            const auto& refs = plan.functions[f];
            if (refs.empty()) continue;
            std::fill(scratch.begin(), scratch.end(), 0.0);
            for (const auto& ref : refs) {
                double m2 = std::norm(ref.fn->eval(tables));
                if (m2 == 0.0) continue;
                for (std::size_t ip = 0; ip < np; ++ip)
                    scratch[ip * nl + static_cast<std::size_t>(ref.level)] += plan.pows[ip](m2);
            }
            for (std::size_t c = 0; c < nc; ++c) {
                const double* row = scratch.data() + plan.pidx[c] * nl;
                double sum = 0.0;
                for (int l = 0; l <= plan.combos[c].k; ++l) sum += row[l];
                out[f * nc + c] += node_w * pow_s[c] * sum;
            }
        }
    };

    VecAcc total;
    if (g.domain == Domain::Hartogs) {
        const GridAxis& a2 = g.radial;
        const GridAxis& a1 = g.fiber;
        std::size_t na2 = static_cast<std::size_t>(a2.n_ang);
        total = detail::chunked_reduce<VecAcc>(
            a2.r.size() * na2,
            [&](std::size_t i2) {
                VecAcc acc;
                acc.v.assign(nf * nc, 0.0);
                std::vector<double> scratch(np * nl, 0.0);
                std::size_t ir2 = i2 / na2, ia2 = i2 % na2;
                double r2 = a2.r[ir2];
                cd z2 = r2 * a2.phase[ia2];
                std::vector<double> pow_s(nc);
                for (std::size_t c = 0; c < nc; ++c)
                    pow_s[c] = std::pow(r2, plan.combos[c].s);
                PowerTables tables;
                for (std::size_t ir1 = 0; ir1 < a1.r.size(); ++ir1) {
                    double rad = r2 * a1.r[ir1];
                    for (int ia1 = 0; ia1 < a1.n_ang; ++ia1) {
                        cd z1 = rad * a1.phase[static_cast<std::size_t>(ia1)];
                        tables.build(z1, z2, plan.bounds);
                        node_accumulate(tables, a1.wr[ir1], pow_s, acc.v, scratch);
                    }
                }
                double scale = a2.wr[ir2] * a2.ang_weight * a1.ang_weight * r2 * r2;
                for (double& x : acc.v) x *= scale;
                return acc;
            },
            resolve_thread_count(threads));
    } else {
        const GridAxis& ax = g.radial;
        total = detail::chunked_reduce<VecAcc>(
            ax.r.size(),
            [&](std::size_t ir) {
                VecAcc acc;
                acc.v.assign(nf * nc, 0.0);
                std::vector<double> scratch(np * nl, 0.0);
                double r = ax.r[ir];
                std::vector<double> pow_s(nc);
                for (std::size_t c = 0; c < nc; ++c) pow_s[c] = std::pow(r, plan.combos[c].s);
                PowerTables tables;
                for (int ia = 0; ia < ax.n_ang; ++ia) {
                    cd w = r * ax.phase[static_cast<std::size_t>(ia)];
                    tables.build(0.0, w, plan.bounds);
                    node_accumulate(tables, 1.0, pow_s, acc.v, scratch);
                }
                double scale = ax.wr[ir] * ax.ang_weight;
                for (double& x : acc.v) x *= scale;
                return acc;
            },
            resolve_thread_count(threads));
    }
    total.v.resize(nf * nc, 0.0);
    for (double x : total.v)
        if (!std::isfinite(x)) throw EvaluationError("batched norms: non-finite accumulation");
    return total.v;
}

double median_of(std::vector<double> xs) {
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    std::size_t mid = xs.size() / 2;
    if (xs.size() % 2) return xs[mid];
    return 0.5 * (xs[mid - 1] + xs[mid]);
}

struct PreparedFamily {
    std::vector<FnBundle> src, img;
    std::vector<std::string> names;
};

PreparedFamily prepare_family(const TestFamily& family, int depth) {
    if (family.functions.empty()) throw ConfigError("probe: empty test family");
    PreparedFamily out;
    for (const SymbolicFunction& f : family.functions) {
        out.src.push_back(FnBundle::make(f, depth));
        out.img.push_back(FnBundle::make(project_hartogs(f), depth));
        out.names.push_back(f.to_string());
    }
    return out;
}

// The estimate pairs the weighted image norm with the unweighted source
// norm: ratio = ||B f||_{k,p,kp} / ||f||_{k,p}. Internally each requested
// (k, p) becomes two batch combos, source first.
std::vector<RatioReport> ratio_reports(const PreparedFamily& fam,
                                       const std::vector<SobolevParams>& pairs,
                                       const GridSpec& grid, bool stability_pass) {
    std::size_t nf = fam.src.size(), npair = pairs.size();
    std::vector<const FnBundle*> bundles;
    bundles.reserve(2 * nf);
    for (const FnBundle& b : fam.src) bundles.push_back(&b);
    for (const FnBundle& b : fam.img) bundles.push_back(&b);
    std::vector<SobolevParams> combos;
    for (const SobolevParams& c : pairs) {
        combos.push_back({c.k, c.p, 0.0});  // source norm, no weight
        combos.push_back(c);                // image norm, delta^(k p)
    }
    BatchPlan plan = make_plan(bundles, combos);
    std::size_t nc = combos.size();

    auto norms_at = [&](const std::vector<double>& S, std::size_t f, std::size_t pair,
                        double inv_p) {
        double src = std::pow(S[f * nc + 2 * pair], inv_p);
        double img = std::pow(S[(nf + f) * nc + 2 * pair + 1], inv_p);
        return std::pair<double, double>{src, img};
    };

    QuadGrid base = grid.build();
    std::vector<double> S = run_batch(plan, base);
    std::vector<RatioReport> reports(npair);
    for (std::size_t c = 0; c < npair; ++c) {
        RatioReport& rep = reports[c];
        rep.k = pairs[c].k;
        rep.p = pairs[c].p;
        rep.weight_exponent = pairs[c].s;
        rep.grid_fingerprint = base.fingerprint;
        std::vector<double> ratios;
        for (std::size_t f = 0; f < nf; ++f) {
            auto [src, img] = norms_at(S, f, c, 1.0 / pairs[c].p);
            if (!std::isfinite(src) || src == 0.0)
                throw ConfigError("probe: family member " + fam.names[f] +
                                  " has zero or non-finite source norm");
            RatioEntry e;
            e.function = fam.names[f];
            e.source_norm = src;
            e.image_norm = img;
            e.ratio = img / src;
            ratios.push_back(e.ratio);
            rep.entries.push_back(std::move(e));
        }
        rep.max_ratio = *std::max_element(ratios.begin(), ratios.end());
        rep.median_ratio = median_of(ratios);
    }
    if (stability_pass) {
        QuadGrid fine = grid.doubled().build();
        std::vector<double> Sf = run_batch(plan, fine);
        for (std::size_t c = 0; c < npair; ++c) {
            double best = 0.0;
            for (std::size_t f = 0; f < nf; ++f) {
                auto [src, img] = norms_at(Sf, f, c, 1.0 / pairs[c].p);
                if (src > 0.0) best = std::max(best, img / src);
            }
            reports[c].refined_fingerprint = fine.fingerprint;
            reports[c].max_ratio_refined = best;
            reports[c].stability =
                reports[c].max_ratio > 0.0
                    ? std::abs(reports[c].max_ratio - best) / reports[c].max_ratio
                    : 0.0;
        }
    }
    return reports;
}

}  // namespace

RatioReport probe_main_estimate(int k, double p, const TestFamily& family, const GridSpec& grid,
                                bool stability_pass) {
    if (grid.domain != Domain::Hartogs)
        throw ConfigError("probe_main_estimate: grid must cover the Hartogs triangle");
    PreparedFamily fam = prepare_family(family, k);
    SobolevParams combo{k, p, static_cast<double>(k) * p};
    return ratio_reports(fam, {combo}, grid, stability_pass)[0];
}

std::vector<RatioReport> probe_estimate_matrix(const std::vector<int>& ks,
                                               const std::vector<double>& ps,
                                               const TestFamily& family, const GridSpec& grid,
                                               bool stability_pass) {
    if (grid.domain != Domain::Hartogs)
        throw ConfigError("probe_estimate_matrix: grid must cover the Hartogs triangle");
    if (ks.empty() || ps.empty()) throw ConfigError("probe_estimate_matrix: empty parameter lists");
    int depth = *std::max_element(ks.begin(), ks.end());
    PreparedFamily fam = prepare_family(family, depth);
    std::vector<SobolevParams> combos;
    for (int k : ks)
        for (double p : ps) combos.push_back({k, p, static_cast<double>(k) * p});
    return ratio_reports(fam, combos, grid, stability_pass);
}

CounterexampleReport probe_counterexample(int k, double p, const std::vector<double>& cutoffs,
                                          const GridSpec& grid) {
    if (grid.domain != Domain::Hartogs)
        throw ConfigError("probe_counterexample: grid must cover the Hartogs triangle");
    // exact projection of conj(z2): half of 1/z2
    SymbolicFunction image =
        SymbolicFunction::monomial(GaussianRational{Rat(1) / 2, Rat(0)}, 0, -1, 0, 0);
    FnBundle bundle = FnBundle::make(image, k);
    double s = static_cast<double>(k) * p;
    std::vector<double> totals, tops;
    for (double eps : cutoffs) {
        QuadGrid g = grid.with_eps(eps).build();
        std::vector<double> levels = weighted_level_powers(bundle, p, s, g);
        double total = 0.0;
        for (int l = 0; l <= k; ++l) total += levels[static_cast<std::size_t>(l)];
        totals.push_back(total);
        tops.push_back(levels[static_cast<std::size_t>(k)]);
    }
    CounterexampleReport rep;
    rep.k = k;
    rep.p = p;
    rep.total = classify_divergence(cutoffs, totals);
    rep.top_level = classify_divergence(cutoffs, tops);
    rep.function = image.to_string();
    return rep;
}

WindowReport probe_lp_window(const std::vector<double>& p_list, const GridSpec& grid,
                             std::uint64_t seed) {
    if (grid.domain != Domain::Hartogs)
        throw ConfigError("probe_lp_window: grid must cover the Hartogs triangle");
    if (p_list.empty()) throw ConfigError("probe_lp_window: empty exponent list");
    WindowReport rep;

    // face 1: plain L^p ratios (k = 0) over a small polynomial family
    TestFamily family = TestFamily::random_polynomials(seed, 12, 3, 3);
    PreparedFamily fam = prepare_family(family, 0);
    std::vector<SobolevParams> combos;
    for (double p : p_list) combos.push_back({0, p, 0.0});
    std::vector<RatioReport> faces = ratio_reports(fam, combos, grid, false);
    rep.grid_fingerprint = faces[0].grid_fingerprint;

    // face 2: norm trend of the projected truncation B(conj(z2) 1_{|z2|>eps})
    // = (1-eps^4)/2 * 1/z2, measured over the same truncated region
    const std::vector<double> cutoffs{1e-2, 1e-3, 1e-4};
    std::vector<FnBundle> images;
    std::vector<QuadGrid> grids;
    for (double eps : cutoffs) {
        int num = static_cast<int>(std::llround(1.0 / eps));
        Rat eps_rat = Rat(1) / num;
        Monomial source{GaussianRational{Rat(1), Rat(0)}, 0, 0, 0, 1};
        ExactTerm term = project_monomial_hartogs(source, eps_rat);
        GaussianRational c = term.coeff.q;  // pi_power is 0 for this ratio
        images.push_back(FnBundle::make(
            SymbolicFunction::monomial(c, term.alpha, term.beta, 0, 0), 0));
        grids.push_back(grid.with_eps(eps).build());
    }
    for (std::size_t ip = 0; ip < p_list.size(); ++ip) {
        WindowEntry entry;
        entry.p = p_list[ip];
        entry.max_ratio = faces[ip].max_ratio;
        std::vector<double> values;
        for (std::size_t ie = 0; ie < cutoffs.size(); ++ie)
            values.push_back(weighted_level_powers(images[ie], entry.p, 0.0, grids[ie])[0]);
        entry.image_trend = classify_divergence(cutoffs, values);
        entry.verdict = entry.image_trend.verdict;
        entry.inside_window = entry.p > 4.0 / 3.0 && entry.p < 4.0;
        rep.entries.push_back(std::move(entry));
    }
    return rep;
}

IdentityReport verify_kernel_identity(int b_max, int sample_count, std::uint64_t seed) {
    if (b_max < 0 || sample_count <= 0) throw ConfigError("verify_kernel_identity: bad arguments");
    Rng rng(seed);
    IdentityReport rep;
    rep.name = "kernel-derivative-identity";
    double worst = 0.0;
    for (int i = 0; i < sample_count; ++i) {
        double rw = 0.1 + 0.8 * rng.unit(), re = 0.1 + 0.8 * rng.unit();
        double tw = 6.283185307179586 * rng.unit(), te = 6.283185307179586 * rng.unit();
        cd w = std::polar(rw, tw), eta = std::polar(re, te);
        cd swap = std::conj(eta) / w;
        for (int b = 0; b <= b_max; ++b) {
            cd lhs = kernel_w2_derivative(b, w, eta);
            cd rhs = kernel_etabar_derivative(b, w, eta);
            for (int j = 0; j < b; ++j) rhs *= swap;
            double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
            worst = std::max(worst, std::abs(lhs - rhs) / scale);
            ++rep.cases;
        }
    }
    rep.max_abs_residual = worst;
    return rep;
}

IdentityReport verify_ibp(int b, const SymbolicFunction& f, cd w2, const GridSpec& grid) {
    if (b < 0) throw ConfigError("verify_ibp: order must be nonnegative");
    if (f.uses_slot1()) throw ConfigError("verify_ibp: test function must use the second slot only");
    if (grid.domain == Domain::Hartogs) throw ConfigError("verify_ibp: needs a one-slot grid");
    if (std::abs(w2) >= 1.0 || w2 == cd(0.0))
        throw SingularPointError("verify_ibp: w2 must lie in the punctured disc");

    // T^j f symbolically, compiled for the node loop
    std::vector<CompiledFunction> tf;
    ExponentBounds bounds;
    {
        SymbolicFunction g = f;
        for (int j = 0; j <= b; ++j) {
            CompiledFunction c = CompiledFunction::from(g);
            if (j == 0)
                bounds = c.bounds;
            else
                bounds.merge(c.bounds);
            tf.push_back(std::move(c));
            if (j < b) g = tangential_raw(g, 2);
        }
    }
    std::vector<GaussianRational> d = tangential_expansion(b);

    QuadGrid g = grid.build();
    const GridAxis& ax = g.radial;
    // one sweep: slot 0 is the direct-derivative side, slot 1+j pairs the
    // kernel with T^j f
    VecAcc sums = detail::chunked_reduce<VecAcc>(
        ax.r.size(),
        [&](std::size_t ir) {
            VecAcc acc;
            acc.v.assign(2 * static_cast<std::size_t>(b) + 4, 0.0);
            double r = ax.r[ir];
            PowerTables tables;
            for (int ia = 0; ia < ax.n_ang; ++ia) {
                cd eta = r * ax.phase[static_cast<std::size_t>(ia)];
                tables.build(0.0, eta, bounds);
                double area = r * r;  // |eta|^2 weight
                cd kd = kernel_w2_derivative(b, w2, eta) * area;
                cd k0 = kernel_w2_derivative(0, w2, eta) * area;
                cd v = kd * tf[0].eval(tables);
                acc.v[0] += v.real();
                acc.v[1] += v.imag();
                for (int j = 0; j <= b; ++j) {
                    cd u = k0 * tf[static_cast<std::size_t>(j)].eval(tables);
                    acc.v[2 * static_cast<std::size_t>(j) + 2] += u.real();
                    acc.v[2 * static_cast<std::size_t>(j) + 3] += u.imag();
                }
            }
            double scale = ax.wr[ir] * ax.ang_weight;
            for (double& x : acc.v) x *= scale;
            return acc;
        },
        resolve_thread_count(-1));

    cd lhs{sums.v[0], sums.v[1]};
    cd rhs = 0.0;
    double sign = 1.0;
    for (int j = 0; j <= b; ++j) {
        cd term{sums.v[2 * static_cast<std::size_t>(j) + 2],
                sums.v[2 * static_cast<std::size_t>(j) + 3]};
        rhs += sign * d[static_cast<std::size_t>(j)].to_complex() * term;
        sign = -sign;
    }
    cd wb = 1.0;
    for (int j = 0; j < b; ++j) wb *= w2;
    rhs /= wb;

    IdentityReport rep;
    rep.name = "integration-by-parts";
    rep.cases = 1;
    rep.max_abs_residual = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1.0});
    return rep;
}

LemmaB2Report verify_lemma_b2(double p, const TestFamily& family, const GridSpec& grid) {
    if (grid.domain == Domain::Hartogs) throw ConfigError("verify_lemma_b2: needs a one-slot grid");
    if (!(p > 1.0)) throw ConfigError("verify_lemma_b2: need p > 1");
    if (family.functions.empty()) throw ConfigError("verify_lemma_b2: empty family");
    LemmaB2Report rep;
    rep.p = p;

    // face 1: unnormalized disc-kernel operator on polynomials in w, conj(w),
    // measured in L^p(D*, |w|^(2-p)); images are exact, scaled by one pi
    constexpr double pi = 3.141592653589793;
    std::vector<FnBundle> src, img;
    std::vector<std::string> names;
    for (const SymbolicFunction& f : family.functions) {
        if (f.uses_slot1())
            throw ConfigError("verify_lemma_b2: family must use the second slot only");
        std::vector<Monomial> image_terms;
        for (const Monomial& m : f.terms()) {
            if (m.a != 0 || m.c != 0 || m.b < 0 || m.d < 0)
                throw ConfigError("verify_lemma_b2: family must be polynomial in one slot");
            ExactTerm1C t = b2_image_monomial(m.b, m.d, Rat(0));
            if (t.is_zero()) continue;
            GaussianRational c = m.coeff * t.coeff.q;  // pi factored out below
            image_terms.push_back(Monomial{c, 0, t.power, 0, 0});
        }
        src.push_back(FnBundle::make(f, 0));
        img.push_back(FnBundle::make(SymbolicFunction{std::move(image_terms)}, 0));
        names.push_back(f.to_string());
    }
    std::vector<const FnBundle*> bundles;
    for (const FnBundle& bnd : src) bundles.push_back(&bnd);
    for (const FnBundle& bnd : img) bundles.push_back(&bnd);
    SobolevParams combo{0, p, 2.0 - p};
    BatchPlan plan = make_plan(bundles, {combo});
    QuadGrid base = grid.build();
    std::vector<double> S = run_batch(plan, base);
    RatioReport& face = rep.polynomial_face;
    face.k = 0;
    face.p = p;
    face.weight_exponent = 2.0 - p;
    face.grid_fingerprint = base.fingerprint;
    std::vector<double> ratios;
    std::size_t nf = src.size();
    for (std::size_t f = 0; f < nf; ++f) {
        double inv_p = 1.0 / p;
        RatioEntry e;
        e.function = names[f];
        e.source_norm = std::pow(S[f], inv_p);
        e.image_norm = pi * std::pow(S[nf + f], inv_p);
        if (!std::isfinite(e.source_norm) || e.source_norm == 0.0)
            throw ConfigError("verify_lemma_b2: family member " + names[f] +
                              " has zero or non-finite norm");
        e.ratio = e.image_norm / e.source_norm;
        ratios.push_back(e.ratio);
        face.entries.push_back(std::move(e));
    }
    face.max_ratio = *std::max_element(ratios.begin(), ratios.end());
    face.median_ratio = median_of(ratios);

    // face 2: the weighted projection sends conj(w) 1_{|w|>eps} to
    // (1-eps^4)/2 * 1/w; its norm trend is measured against the lemma weight
    // |w|^(2-p) and against the projection weight |w|^2
    const std::vector<double> cutoffs{1e-1, 1e-2, 1e-3};
    std::vector<double> lit, wtd;
    for (double eps : cutoffs) {
        int num = static_cast<int>(std::llround(1.0 / eps));
        Rat eps_rat = Rat(1) / num;
        Rat c = (1 - rat_pow(eps_rat, 4)) / 2;
        FnBundle image = FnBundle::make(
            SymbolicFunction::monomial(GaussianRational{c, Rat(0)}, 0, -1, 0, 0), 0);
        QuadGrid g = grid.with_eps(eps).build();
        lit.push_back(weighted_level_powers(image, p, 2.0 - p, g)[0]);
        wtd.push_back(weighted_level_powers(image, p, 2.0, g)[0]);
    }
    rep.sharp_literal = classify_divergence(cutoffs, lit);
    rep.sharp_weighted = classify_divergence(cutoffs, wtd);
    return rep;
}

IdentityReport verify_transfer_exact(int beta_max) {
    if (beta_max < 0) throw ConfigError("verify_transfer_exact: order must be nonnegative");
    IdentityReport rep;
    rep.name = "operator-transfer";
    rep.exact = true;

    // 20 monomials z1^m z2^n with m >= 0, m + n >= -1
    std::vector<SymbolicFunction> monomials;
    for (int m = 0; m <= 3; ++m)
        for (int n = -1; n <= 3; ++n)
            monomials.push_back(
                SymbolicFunction::monomial(GaussianRational{Rat(1), Rat(0)}, m, n, 0, 0));

    // 20 fixed rational sample points with w2 != 0
    std::vector<std::pair<GaussianRational, GaussianRational>> points;
    for (int t = 0; t < 20; ++t) {
        GaussianRational w1{Rat(t % 5 - 2) / 3, Rat((t / 5) % 4 - 1) / 4};
        GaussianRational w2{Rat(t % 3 + 1) / 4, Rat(t % 2 == 0 ? 1 : -1) / 5};
        points.emplace_back(w1, w2);
    }

    bool all_equal = true;
    for (const MultiIndex2& beta : bi_indices_up_to(beta_max)) {
        WOperator op = transfer_dz(beta);
        for (const SymbolicFunction& gz : monomials) {
            SymbolicFunction dg = gz;
            for (int i = 0; i < beta.b1; ++i) dg = dg.derivative(Var::V1);
            for (int i = 0; i < beta.b2; ++i) dg = dg.derivative(Var::V2);
            SymbolicFunction dg_psi = dg.compose_psi();
            SymbolicFunction g_psi = gz.compose_psi();
            for (const auto& [w1, w2] : points) {
                GaussianRational lhs = apply_woperator(op, g_psi, w1, w2);
                GaussianRational rhs = dg_psi.eval_exact(w1, w2);
                if (!(lhs - rhs).is_zero()) all_equal = false;
                ++rep.cases;
            }
        }
    }
    rep.max_abs_residual = all_equal ? 0.0 : 1.0;
    return rep;
}

IdentityReport verify_tangential(int b_max, int m_max) {
    if (b_max < 0 || m_max < 0) throw ConfigError("verify_tangential: bad arguments");
    IdentityReport rep;
    rep.name = "tangential-coefficients";
    rep.exact = true;
    bool ok = true;
    for (int b = 0; b <= b_max; ++b) {
        TangentialForm form = tangential_power(b);
        std::vector<GaussianRational> d = tangential_expansion(b);
        for (int m = 0; m <= m_max; ++m) {
            // sum_j c_j m^(j) == (m i / 2)^b: T^b on conj(w)^m
            GaussianRational lhs{};
            Rat falling(1);
            for (int j = 0; j <= b; ++j) {
                lhs = lhs + form.c[static_cast<std::size_t>(j)] * GaussianRational{falling, Rat(0)};
                falling *= (m - j);
            }
            GaussianRational eig{Rat(0), Rat(m) / 2};
            if (!(lhs - gr_pow(eig, b)).is_zero()) ok = false;
            ++rep.cases;

            // inverse expansion: sum_j d_j (m i / 2)^j == m^(b) (falling)
            GaussianRational back{};
            for (int j = 0; j <= b; ++j) back = back + d[static_cast<std::size_t>(j)] * gr_pow(eig, j);
            Rat fb(1);
            for (int j = 0; j < b; ++j) fb *= (m - j);
            if (!(back - GaussianRational{fb, Rat(0)}).is_zero()) ok = false;
            ++rep.cases;
        }
    }
    rep.max_abs_residual = ok ? 0.0 : 1.0;
    return rep;
}

}  // namespace hartogs
