#include "hartogs/quadrature.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace hartogs {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// FNV-1a, enough for a stable grid/config fingerprint.
std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

Domain parse_domain(const std::string& tag) {
  std::string t;
  for (char ch : tag) t += (ch == '_') ? '-' : static_cast<char>(std::tolower(ch));
  if (t == "disc") return Domain::Disc;
  if (t == "punctured" || t == "punctured-disc") return Domain::PuncturedDisc;
  if (t == "hartogs") return Domain::Hartogs;
  throw ConfigError("unknown domain '" + tag + "'");
}

std::string domain_tag(Domain d) {
  switch (d) {
    case Domain::Disc: return "disc";
    case Domain::PuncturedDisc: return "punctured-disc";
    case Domain::Hartogs: return "hartogs";
  }
  return "?";
}

GaussRule gauss_legendre(int order) {
  if (order < 1 || order > 64) throw ConfigError("gauss_legendre: order must be in [1,64]");
  GaussRule rule;
  rule.x.resize(static_cast<std::size_t>(order));
  rule.w.resize(static_cast<std::size_t>(order));
  int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton on P_n with the Chebyshev-like initial guess.
    double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      if (order == 1) p1 = x;
      for (int k = 2; k <= order; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double pn = (order == 1) ? x : p1;
      double pm = (order == 1) ? 1.0 : p0;
      pp = order * (x * pn - pm) / (x * x - 1.0);
      double dx = pn / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.x[static_cast<std::size_t>(i)] = -x;
    rule.x[static_cast<std::size_t>(order - 1 - i)] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.w[static_cast<std::size_t>(i)] = w;
    rule.w[static_cast<std::size_t>(order - 1 - i)] = w;
  }
  return rule;
}

namespace {

GridAxis make_axis(int cells, int gauss_order, int n_ang, double lo, double grading) {
  GridAxis ax;
  GaussRule rule = gauss_legendre(gauss_order);
  // Geometric widths, smallest adjacent to lo: width_j = C * grading^(cells-j).
  double gn = std::pow(grading, cells);
  double C = (1.0 - lo) * (1.0 - grading) / (1.0 - gn);
  std::vector<double> bounds(static_cast<std::size_t>(cells) + 1);
  bounds[0] = lo;
  for (int j = 1; j <= cells; ++j)
    bounds[static_cast<std::size_t>(j)] =
        bounds[static_cast<std::size_t>(j - 1)] + C * std::pow(grading, cells - j);
  bounds[static_cast<std::size_t>(cells)] = 1.0;
  ax.r.reserve(static_cast<std::size_t>(cells * gauss_order));
  ax.wr.reserve(static_cast<std::size_t>(cells * gauss_order));
  for (int j = 0; j < cells; ++j) {
    double a = bounds[static_cast<std::size_t>(j)], b = bounds[static_cast<std::size_t>(j) + 1];
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int q = 0; q < gauss_order; ++q) {
      double r = mid + half * rule.x[static_cast<std::size_t>(q)];
      ax.r.push_back(r);
      ax.wr.push_back(rule.w[static_cast<std::size_t>(q)] * half * r);
    }
  }
  ax.n_ang = n_ang;
  ax.ang_weight = 2.0 * kPi / n_ang;
  ax.phase.resize(static_cast<std::size_t>(n_ang));
  for (int j = 0; j < n_ang; ++j) {
    double th = 2.0 * kPi * j / n_ang;
    ax.phase[static_cast<std::size_t>(j)] = {std::cos(th), std::sin(th)};
  }
  return ax;
}

void validate_grid_params(int radial_cells, int angular_count, double eps_min, double grading,
                          int gauss_order) {
  if (radial_cells < 1) throw ConfigError("grid: radial_cells must be >= 1");
  if (angular_count < 4) throw ConfigError("grid: angular_count must be >= 4");
  if (!(eps_min > 0.0 && eps_min < 1.0)) throw ConfigError("grid: eps_min must lie in (0,1)");
  if (!(grading > 0.0 && grading < 1.0)) throw ConfigError("grid: grading must lie in (0,1)");
  if (gauss_order < 1) throw ConfigError("grid: gauss_order must be >= 1");
}

}  // namespace

QuadGrid build_grid(Domain domain, int radial_cells, int angular_count, double eps_min,
                    double grading, int gauss_order) {
  validate_grid_params(radial_cells, angular_count, eps_min, grading, gauss_order);
  QuadGrid g;
  g.domain = domain;
  g.radial_cells = radial_cells;
  g.angular_count = angular_count;
  g.gauss_order = gauss_order;
  g.eps_min = eps_min;
  g.grading = grading;
  g.radial = make_axis(radial_cells, gauss_order, angular_count, eps_min, grading);
  std::string params = "domain=" + domain_tag(domain) + ";cells=" + std::to_string(radial_cells) +
                       ";ang=" + std::to_string(angular_count) + ";eps=" + fmt17(eps_min) +
                       ";grading=" + fmt17(grading) + ";gauss=" + std::to_string(gauss_order);
  if (domain == Domain::Hartogs) {
    int fiber_cells = std::max(2, radial_cells / 2);
    int fiber_ang = std::max(12, angular_count / 2);
    g.fiber = make_axis(fiber_cells, gauss_order, fiber_ang, eps_min, grading);
    params += ";fiber_cells=" + std::to_string(fiber_cells) +
              ";fiber_ang=" + std::to_string(fiber_ang);
    g.node_count = g.radial.r.size() * static_cast<std::size_t>(g.radial.n_ang) *
                   g.fiber.r.size() * static_cast<std::size_t>(g.fiber.n_ang);
  } else {
    g.node_count = g.radial.r.size() * static_cast<std::size_t>(g.radial.n_ang);
  }
  g.fingerprint = hex64(fnv1a(params));
  return g;
}

QuadGrid default_grid(Domain domain, int radial_cells, int angular_count, double eps_min,
                      double grading) {
  if (domain == Domain::Hartogs)
    return build_grid(domain, std::max(2, radial_cells / 2), std::max(8, angular_count / 2),
                      eps_min, grading);
  return build_grid(domain, radial_cells, angular_count, eps_min, grading);
}

QuadGrid refine_grid(const QuadGrid& g) {
  return build_grid(g.domain, 2 * g.radial_cells, 2 * g.angular_count, g.eps_min, g.grading,
                    g.gauss_order);
}

double truncated_volume(const QuadGrid& g) {
  double e2 = g.eps_min * g.eps_min;
  if (g.domain != Domain::Hartogs) return kPi * (1.0 - e2);
  // Fiber truncation is relative: inner discs of radius |z2| keep the band
  // (eps|z2|, |z2|).
  return kPi * (1.0 - e2) * kPi * (1.0 - e2 * e2) / 2.0;
}

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BERGMAN_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1 && v <= 1024) return static_cast<int>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

FnBundle FnBundle::make(const SymbolicFunction& f, int depth) {
  if (depth < 0) throw ConfigError("FnBundle: depth must be nonnegative");
  FnBundle bundle;
  bundle.depth = depth;
  for (const MultiIndex4& alpha : multi_indices_up_to(depth)) {
    SymbolicFunction g = f;
    for (int i = 0; i < alpha.a1; ++i) g = g.derivative(Var::V1);
    for (int i = 0; i < alpha.a2; ++i) g = g.derivative(Var::V2);
    for (int i = 0; i < alpha.a1c; ++i) g = g.derivative(Var::V1Bar);
    for (int i = 0; i < alpha.a2c; ++i) g = g.derivative(Var::V2Bar);
    BundleEntry entry;
    entry.alpha = alpha;
    entry.level = alpha.total();
    entry.symbolic = g;
    entry.compiled = CompiledFunction::from(g);
    bundle.bounds.merge(entry.compiled.bounds);
    bundle.entries.push_back(std::move(entry));
  }
  return bundle;
}

PPow::PPow(double p_in) : p(p_in) {
  if (!(p > 0.0)) throw ConfigError("PPow: p must be positive");
  double half = 0.5 * p;
  double q4 = half * 4.0;
  if (q4 == std::floor(q4) && q4 <= 64.0) {
    whole = static_cast<int>(std::floor(half));
    quarters = static_cast<int>(q4) - 4 * whole;
    general = false;
  } else {
    general = true;
  }
}

namespace {

struct LevelAcc {
  std::vector<double> v;
  LevelAcc& operator+=(const LevelAcc& o) {
    if (v.size() < o.v.size()) v.resize(o.v.size(), 0.0);
    for (std::size_t i = 0; i < o.v.size(); ++i) v[i] += o.v[i];
    return *this;
  }
};

}  // namespace

std::vector<double> weighted_level_powers(const FnBundle& bundle, double p, double s,
                                          const QuadGrid& g, int threads) {
  PPow pp(p);
  std::size_t levels = static_cast<std::size_t>(bundle.depth) + 1;
  LevelAcc total;
  if (g.domain == Domain::Hartogs) {
    const GridAxis& a2 = g.radial;
    const GridAxis& a1 = g.fiber;
    std::size_t na2 = static_cast<std::size_t>(a2.n_ang);
    // delta = |z2| depends only on the z2 radial index
    std::vector<double> wpow(a2.r.size());
    for (std::size_t i = 0; i < wpow.size(); ++i) wpow[i] = std::pow(a2.r[i], s);
    total = detail::chunked_reduce<LevelAcc>(
        a2.r.size() * na2,
        [&](std::size_t i2) {
          LevelAcc acc;
          acc.v.assign(levels, 0.0);
          std::size_t ir2 = i2 / na2, ia2 = i2 % na2;
          double r2 = a2.r[ir2];
          cd z2 = r2 * a2.phase[ia2];
          PowerTables tables;
          for (std::size_t ir1 = 0; ir1 < a1.r.size(); ++ir1) {
            double rad = r2 * a1.r[ir1];
            for (int ia1 = 0; ia1 < a1.n_ang; ++ia1) {
              cd z1 = rad * a1.phase[static_cast<std::size_t>(ia1)];
              tables.build(z1, z2, bundle.bounds);
              double node_w = a1.wr[ir1];
              for (const BundleEntry& e : bundle.entries) {
                if (e.compiled.entries.empty()) continue;
                double m2 = std::norm(e.compiled.eval(tables));
                acc.v[static_cast<std::size_t>(e.level)] += node_w * pp(m2);
              }
            }
          }
          double scale = a2.wr[ir2] * a2.ang_weight * a1.ang_weight * r2 * r2 * wpow[ir2];
          for (double& x : acc.v) x *= scale;
          return acc;
        },
        resolve_thread_count(threads));
  } else {
    const GridAxis& ax = g.radial;
    std::vector<double> wpow(ax.r.size());
    for (std::size_t i = 0; i < wpow.size(); ++i) wpow[i] = std::pow(ax.r[i], s);
    total = detail::chunked_reduce<LevelAcc>(
        ax.r.size(),
        [&](std::size_t ir) {
          LevelAcc acc;
          acc.v.assign(levels, 0.0);
          double r = ax.r[ir];
          PowerTables tables;
          for (int ia = 0; ia < ax.n_ang; ++ia) {
            cd w = r * ax.phase[static_cast<std::size_t>(ia)];
            tables.build(0.0, w, bundle.bounds);
            for (const BundleEntry& e : bundle.entries) {
              if (e.compiled.entries.empty()) continue;
              double m2 = std::norm(e.compiled.eval(tables));
              acc.v[static_cast<std::size_t>(e.level)] += pp(m2);
            }
          }
          double scale = ax.wr[ir] * ax.ang_weight * wpow[ir];
          for (double& x : acc.v) x *= scale;
          return acc;
        },
        resolve_thread_count(threads));
  }
  total.v.resize(levels, 0.0);
  return total.v;
}

double sobolev_norm(const FnBundle& bundle, SobolevParams params, const QuadGrid& g, int threads) {
  if (params.k < 0) throw ConfigError("sobolev_norm: k must be nonnegative");
  if (bundle.depth < params.k)
    throw ConfigError("sobolev_norm: bundle depth " + std::to_string(bundle.depth) +
                      " is smaller than k = " + std::to_string(params.k));
  if (!(params.p > 0.0)) throw ConfigError("sobolev_norm: p must be positive");
  std::vector<double> levels = weighted_level_powers(bundle, params.p, params.s, g, threads);
  double acc = 0.0;
  for (int l = 0; l <= params.k; ++l) acc += levels[static_cast<std::size_t>(l)];
  return std::pow(acc, 1.0 / params.p);
}

}  // namespace hartogs
