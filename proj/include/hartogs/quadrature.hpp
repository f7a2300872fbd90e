#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "hartogs/errors.hpp"
#include "hartogs/kernels.hpp"
#include "hartogs/multi_index.hpp"
#include "hartogs/symbolic.hpp"

namespace hartogs {

enum class Domain { Disc, PuncturedDisc, Hartogs };

Domain parse_domain(const std::string& tag);
std::string domain_tag(Domain d);

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> x, w;
};
GaussRule gauss_legendre(int order);

// One complex slot: radial Gauss nodes (weight includes the r jacobian and
// the cell width, not the angular factor) and a uniform angular trapezoid.
struct GridAxis {
  std::vector<double> r, wr;
  int n_ang = 0;
  double ang_weight = 0.0;
  std::vector<cd> phase;
};

// Tensor-product grid. 1-slot domains use `radial` alone. Hartogs grids pair
// a punctured-disc z2 axis with a unit-disc z1 fiber axis; fiber nodes are
// scaled by |z2| at evaluation time and carry the extra |z2|^2 area factor.
struct QuadGrid {
  Domain domain = Domain::Disc;
  int radial_cells = 0, angular_count = 0, gauss_order = 0;
  double eps_min = 0.0, grading = 0.0;
  GridAxis radial;
  GridAxis fiber;
  std::size_t node_count = 0;
  std::string fingerprint;

  std::size_t outer_count() const {
    return radial.r.size() * static_cast<std::size_t>(radial.n_ang);
  }
};

// radial_cells geometric cells graded toward eps_min (width ratio `grading`
// in (0,1)), gauss_order nodes per cell, angular_count uniform angles.
// Hartogs: the z2 slot uses the counts as given; the z1 fiber slot, whose
// integrands are regular, uses radial_cells/2 cells and max(12,
// angular_count/2) angles (the floor keeps low angular harmonics exact).
QuadGrid build_grid(Domain domain, int radial_cells, int angular_count, double eps_min,
                    double grading, int gauss_order = 6);

// The grid a RunConfig's counts produce: as configured for 1-slot domains,
// both counts halved first for Hartogs (tensor cost grows with the square).
QuadGrid default_grid(Domain domain, int radial_cells, int angular_count, double eps_min,
                      double grading);

QuadGrid refine_grid(const QuadGrid& g);  // 2x radial cells, 2x angles

// Exact area (volume) of the truncated domain the grid discretizes; the
// weight sum reproduces it to rounding.
double truncated_volume(const QuadGrid& g);

// Worker count: explicit argument if positive, else BERGMAN_THREADS, else
// hardware concurrency.
int resolve_thread_count(int requested = -1);

namespace detail {

// Deterministic parallel map-reduce: chunk partials are combined along a
// fixed pairwise tree, so the result is independent of thread scheduling.
template <class T, class ChunkFn>
T chunked_reduce(std::size_t n_chunks, ChunkFn&& fn, int threads) {
  if (n_chunks == 0) return T{};
  std::vector<T> partials(n_chunks);
  std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n_chunks);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n_chunks; ++i) partials[i] = fn(i);
  } else {
    std::atomic<std::size_t> next{0};
    auto body = [&] {
      for (;;) {
        std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n_chunks) return;
        partials[i] = fn(i);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }
  std::size_t len = n_chunks;
  while (len > 1) {
    std::size_t half = len / 2;
    for (std::size_t i = 0; i < half; ++i) {
      T combined = partials[2 * i];
      combined += partials[2 * i + 1];
      partials[i] = std::move(combined);
    }
    if (len & 1) partials[half] = std::move(partials[len - 1]);
    len = half + (len & 1);
  }
  return std::move(partials[0]);
}

}  // namespace detail

// Sum of weight * f(w) over a 1-slot grid; chunked by radial index.
template <class F>
cd sum_nodes_1c(const QuadGrid& g, F&& f, int threads = -1) {
  if (g.domain == Domain::Hartogs) throw ConfigError("sum_nodes_1c: grid is a Hartogs grid");
  const GridAxis& ax = g.radial;
  return detail::chunked_reduce<cd>(
      ax.r.size(),
      [&](std::size_t ir) {
        double r = ax.r[ir];
        cd acc = 0;
        for (int ia = 0; ia < ax.n_ang; ++ia) acc += f(r * ax.phase[static_cast<std::size_t>(ia)]);
        return ax.wr[ir] * ax.ang_weight * acc;
      },
      resolve_thread_count(threads));
}

// Sum of weight * f(z1, z2) over a Hartogs grid; chunked by z2 node.
template <class F>
cd sum_nodes_hartogs(const QuadGrid& g, F&& f, int threads = -1) {
  if (g.domain != Domain::Hartogs) throw ConfigError("sum_nodes_hartogs: grid is not a Hartogs grid");
  const GridAxis& a2 = g.radial;
  const GridAxis& a1 = g.fiber;
  std::size_t na2 = static_cast<std::size_t>(a2.n_ang);
  return detail::chunked_reduce<cd>(
      a2.r.size() * na2,
      [&](std::size_t i2) {
        std::size_t ir2 = i2 / na2, ia2 = i2 % na2;
        double r2 = a2.r[ir2];
        cd z2 = r2 * a2.phase[ia2];
        cd acc = 0;
        for (std::size_t ir1 = 0; ir1 < a1.r.size(); ++ir1) {
          double rad = r2 * a1.r[ir1];
          cd row = 0;
          for (int ia1 = 0; ia1 < a1.n_ang; ++ia1)
            row += f(rad * a1.phase[static_cast<std::size_t>(ia1)], z2);
          acc += a1.wr[ir1] * row;
        }
        return (a2.wr[ir2] * a2.ang_weight * a1.ang_weight * r2 * r2) * acc;
      },
      resolve_thread_count(threads));
}

struct IntegrationResult {
  cd value{0.0};
  double error_estimate = 0.0;
};

// Integral with an error estimate from the grid refined 2x in each
// direction. Non-finite integrand values raise EvaluationError with the node.
template <class F>
IntegrationResult integrate(const QuadGrid& g, F&& f, int threads = -1) {
  auto guarded_sum = [&](const QuadGrid& grid) {
    if constexpr (std::is_invocable_v<F&, cd, cd>) {
      return sum_nodes_hartogs(
          grid,
          [&](cd z1, cd z2) {
            cd v = f(z1, z2);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
              throw EvaluationError("integrate: non-finite value at z1=(" +
                                    std::to_string(z1.real()) + "," + std::to_string(z1.imag()) +
                                    "), z2=(" + std::to_string(z2.real()) + "," +
                                    std::to_string(z2.imag()) + ")");
            return v;
          },
          threads);
    } else {
      return sum_nodes_1c(
          grid,
          [&](cd w) {
            cd v = f(w);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
              throw EvaluationError("integrate: non-finite value at w=(" +
                                    std::to_string(w.real()) + "," + std::to_string(w.imag()) +
                                    ")");
            return v;
          },
          threads);
    }
  };
  IntegrationResult out;
  out.value = guarded_sum(g);
  QuadGrid fine = refine_grid(g);
  out.error_estimate = std::abs(out.value - guarded_sum(fine));
  return out;
}

// All derivatives D^alpha f for |alpha| <= depth, compiled for node loops.
struct BundleEntry {
  MultiIndex4 alpha{};
  int level = 0;
  SymbolicFunction symbolic;
  CompiledFunction compiled;
};

struct FnBundle {
  int depth = 0;
  std::vector<BundleEntry> entries;
  ExponentBounds bounds;

  static FnBundle make(const SymbolicFunction& f, int depth);
};

struct SobolevParams {
  int k = 0;
  double p = 2.0;
  double s = 0.0;
};

// p-th power of |v| from |v|^2, specialized for half- and quarter-integer
// p/2 so the hot paths avoid transcendental calls.
struct PPow {
  double p = 2.0;
  int whole = 1;
  int quarters = 0;  // extra exponent in units of 1/4
  bool general = false;

  explicit PPow(double p_in);
  double operator()(double m2) const {
    if (m2 == 0.0) return 0.0;
    if (general) return std::pow(m2, p * 0.5);
    double acc = 1.0;
    for (int i = 0; i < whole; ++i) acc *= m2;
    if (quarters) {
      double s = std::sqrt(m2);
      if (quarters & 2) acc *= s;
      if (quarters & 1) acc *= std::sqrt(s);
    }
    return acc;
  }
};

// Integrals of sum_{|alpha| = level} |D^alpha f|^p * delta^s per level,
// where delta = |z2| on Hartogs grids and |w| on 1-slot grids.
std::vector<double> weighted_level_powers(const FnBundle& bundle, double p, double s,
                                          const QuadGrid& g, int threads = -1);

// (sum over levels <= k of the weighted level powers)^(1/p); requires
// bundle.depth >= k.
double sobolev_norm(const FnBundle& bundle, SobolevParams params, const QuadGrid& g,
                    int threads = -1);

// Bergman projection / integral operators applied by quadrature. The
// WeightedPuncturedDisc kernel integrates against the weight |eta|^2.
template <class F>
cd bergman_apply(KernelId id, F&& f, Point2 z, const QuadGrid& g, int threads = -1) {
  if (id != KernelId::Hartogs)
    throw ConfigError(id == KernelId::ProductModel
                          ? "bergman_apply: the product-model projection factors; use the "
                            "slotwise operators"
                          : "bergman_apply: kernel takes one-component points");
  if (g.domain != Domain::Hartogs) throw ConfigError("bergman_apply: grid/kernel domain mismatch");
  if (!in_domain(id, z)) throw SingularPointError("bergman_apply: point outside domain");
  const GridAxis& a2 = g.radial;
  const GridAxis& a1 = g.fiber;
  std::size_t na2 = static_cast<std::size_t>(a2.n_ang);
  constexpr double pi2 = 9.869604401089358;  // pi^2
  // z1 * conj(unit fiber phase), hoisted out of the node loop
  std::vector<cd> zc(a1.phase.size());
  for (std::size_t i = 0; i < zc.size(); ++i) zc[i] = z.z1 * std::conj(a1.phase[i]);
  return detail::chunked_reduce<cd>(
      a2.r.size() * na2,
      [&](std::size_t i2) {
        std::size_t ir2 = i2 / na2, ia2 = i2 % na2;
        double r2 = a2.r[ir2];
        cd zeta2 = r2 * a2.phase[ia2];
        cd t = z.z2 * std::conj(zeta2);
        cd u = 1.0 - t;
        cd pref = t / (pi2 * u * u);
        cd acc = 0;
        for (std::size_t ir1 = 0; ir1 < a1.r.size(); ++ir1) {
          double rad = r2 * a1.r[ir1];
          cd row = 0;
          for (std::size_t ia1 = 0; ia1 < a1.phase.size(); ++ia1) {
            cd s = t - rad * zc[ia1];
            row += f(rad * a1.phase[ia1], zeta2) / (s * s);
          }
          acc += a1.wr[ir1] * row;
        }
        return (a2.wr[ir2] * a2.ang_weight * a1.ang_weight * r2 * r2) * (pref * acc);
      },
      resolve_thread_count(threads));
}

template <class F>
cd bergman_apply(KernelId id, F&& f, cd z, const QuadGrid& g, int threads = -1) {
  if (kernel_is_bivariate(id)) throw ConfigError("bergman_apply: kernel takes two-component points");
  if (g.domain == Domain::Hartogs) throw ConfigError("bergman_apply: grid/kernel domain mismatch");
  if (!in_domain(id, z)) throw SingularPointError("bergman_apply: point outside domain");
  bool weighted = id == KernelId::WeightedPuncturedDisc;
  return sum_nodes_1c(
      g,
      [&](cd eta) {
        cd k = eval_kernel(id, z, eta);
        return weighted ? k * f(eta) * std::norm(eta) : k * f(eta);
      },
      threads);
}

struct OpSpec {
  enum class Kind { B1a, B2, B3 } kind = Kind::B2;
  int a = 0;
};

// B1a: (1/pi) integral of d^a_w (1 - w conj(eta))^(-2) * h over the disc.
// B2:  integral of (1 - w conj(eta))^(-2) * h over the punctured disc
//      (unnormalized: no 1/pi).
// B3:  weighted projection, kernel WeightedPuncturedDisc against |eta|^2.
template <class F>
cd op_apply(OpSpec op, F&& h, cd w, const QuadGrid& g, int threads = -1) {
  if (g.domain == Domain::Hartogs) throw ConfigError("op_apply: needs a one-slot grid");
  if (std::abs(w) >= 1.0) throw SingularPointError("op_apply: point outside domain");
  switch (op.kind) {
    case OpSpec::Kind::B1a: {
      if (op.a < 0) throw ConfigError("op_apply: derivative order must be nonnegative");
      double fact = 1.0;
      for (int k = 2; k <= op.a + 1; ++k) fact *= k;
      constexpr double pi = 3.141592653589793;
      int a = op.a;
      return sum_nodes_1c(
          g,
          [&, fact, a](cd eta) {
            cd eb = std::conj(eta);
            cd d = 1.0 - w * eb;
            cd dp = 1.0;
            for (int i = 0; i < 2 + a; ++i) dp *= d;
            cd num = fact / pi;
            for (int i = 0; i < a; ++i) num *= eb;
            return num / dp * h(eta);
          },
          threads);
    }
    case OpSpec::Kind::B2:
      return sum_nodes_1c(
          g,
          [&](cd eta) {
            cd d = 1.0 - w * std::conj(eta);
            return h(eta) / (d * d);
          },
          threads);
    case OpSpec::Kind::B3: {
      if (w == cd(0.0)) throw SingularPointError("op_apply: B3 point must be nonzero");
      return sum_nodes_1c(
          g,
          [&](cd eta) {
            return eval_kernel(KernelId::WeightedPuncturedDisc, w, eta) * h(eta) * std::norm(eta);
          },
          threads);
    }
  }
  throw ConfigError("op_apply: unknown operator");
}

}  // namespace hartogs
