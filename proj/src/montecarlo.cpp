#include "tailsum/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "tailsum/errors.hpp"

namespace tailsum {

std::string to_string(Estimator e) {
  switch (e) {
    case Estimator::crude:
      return "crude";
    case Estimator::conditional_max:
      return "conditional";
    case Estimator::conditional_radial:
      return "radial";
  }
  return "unknown";
}

Estimator estimator_from_string(const std::string& name) {
  if (name == "crude") return Estimator::crude;
  if (name == "conditional" || name == "conditional_max") return Estimator::conditional_max;
  if (name == "radial" || name == "conditional_radial") return Estimator::conditional_radial;
  throw InvalidParams("unknown estimator '" + name + "' (expected crude, conditional or radial)");
}

void ChunkStats::merge(const ChunkStats& other) {
  if (other.count == 0) return;
  if (count == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count);
  const double nb = static_cast<double>(other.count);
  const double n = na + nb;
  const double delta = other.mean - mean;
  mean += delta * nb / n;
  m2 += other.m2 + delta * delta * na * nb / n;
  count += other.count;
  hits += other.hits;
}

namespace {

using Clock = std::chrono::steady_clock;

struct CrudeKernel {
  const ModelSpec& spec;
  double u;
  static constexpr bool counts_hits = true;

  double operator()(DrawContext& ctx, std::span<double> y) const {
    draw_log_vector(spec, ctx, y);
    double s = 0.0;
    for (std::size_t k = 0; k < spec.dim(); ++k)
      s += spec.lambda(k) * std::exp(spec.beta(k) * spec.gamma() * y[k]);
    return s > u ? 1.0 : 0.0;
  }
};

// Gaussian conditional law of y_j given y_-j for unit-variance y ~ N(0, sigma).
struct ConditionalLaw {
  std::vector<std::size_t> others;
  std::vector<double> weights;  // sigma_{j,-j} sigma_{-j,-j}^{-1}
  double sd = 1.0;
};

struct ConditionalMaxKernel {
  const ModelSpec& spec;
  double u;
  std::vector<ConditionalLaw> laws;
  static constexpr bool counts_hits = false;

  ConditionalMaxKernel(const ModelSpec& s, double threshold) : spec(s), u(threshold) {
    const std::size_t d = spec.dim();
    const auto& sigma = spec.sigma();
    for (std::size_t j = 0; j < d; ++j) {
      ConditionalLaw law;
      for (std::size_t i = 0; i < d; ++i)
        if (i != j) law.others.push_back(i);
      const std::size_t m = law.others.size();
      if (m > 0) {
        Matrix sub(m, m);
        std::vector<double> cross(m);
        for (std::size_t a = 0; a < m; ++a) {
          cross[a] = sigma(law.others[a], j);
          for (std::size_t b = 0; b < m; ++b) sub(a, b) = sigma(law.others[a], law.others[b]);
        }
        law.weights = cholesky_solve(cholesky_factor(sub), cross);
        double explained = 0.0;
        for (std::size_t a = 0; a < m; ++a) explained += law.weights[a] * cross[a];
        law.sd = std::sqrt(std::max(0.0, 1.0 - explained));
      }
      laws.push_back(std::move(law));
    }
  }

  double operator()(DrawContext& ctx, std::span<double> y) const {
    draw_log_vector(spec, ctx, y);
    const std::size_t d = spec.dim();
    double x[64];
    std::vector<double> heap_x;
    double* xs = x;
    if (d > 64) {
      heap_x.resize(d);
      xs = heap_x.data();
    }
    for (std::size_t k = 0; k < d; ++k)
      xs[k] = spec.lambda(k) * std::exp(spec.beta(k) * spec.gamma() * y[k]);
    double total = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const ConditionalLaw& law = laws[j];
      double rest_max = 0.0;
      double rest_sum = 0.0;
      double mean = 0.0;
      for (std::size_t a = 0; a < law.others.size(); ++a) {
        const std::size_t i = law.others[a];
        rest_max = std::max(rest_max, xs[i]);
        rest_sum += xs[i];
        mean += law.weights[a] * y[i];
      }
      const double t = std::max(rest_max, u - rest_sum);
      if (!(t > 0.0)) {
        total += 1.0;
        continue;
      }
      const double z = std::log(t / spec.lambda(j)) / (spec.beta(j) * spec.gamma());
      total += std_normal_tail((z - mean) / law.sd);
    }
    return total;
  }
};

// Probability that R lands where sum_i lambda_i exp(r a_i) > u, given the
// direction through a_i = beta_i gamma (L U)_i. With g(r) = log sum exp(log
// lambda_i + r a_i) - log u convex in r, the event is r > r_hi, plus r < r_lo
// when g(0) > 0.
class RadialSolver {
 public:
  RadialSolver(const ModelSpec& spec, double u) : spec_(spec), log_u_(std::log(u)) {
    for (std::size_t k = 0; k < spec.dim(); ++k) log_lambda_.push_back(std::log(spec.lambda(k)));
  }

  double probability(std::span<const double> a) const {
    const std::size_t d = a.size();
    std::size_t top = 0;
    for (std::size_t k = 1; k < d; ++k)
      if (a[k] > a[top]) top = k;
    const double g0 = eval(a, 0.0).g;

    if (!(a[top] > 0.0)) {
      // g is non-increasing
      if (g0 <= 0.0) return 0.0;
      std::vector<double> flat;
      for (std::size_t k = 0; k < d; ++k)
        if (a[k] == 0.0) flat.push_back(log_lambda_[k]);
      if (log_sum_exp(flat) - log_u_ > 0.0) return 1.0;
      return 1.0 - spec_.radial().tail(lower_root(a, upper_bracket_decreasing(a)));
    }

    double r_min = 0.0;
    if (g0 > 0.0) {
      if (eval(a, 0.0).dg < 0.0) r_min = argmin(a);
      if (eval(a, r_min).g > 0.0) return 1.0;
    }
    // g(r) >= log lambda_top + r a_top - log u, so this point is at or past the root.
    const double hi = std::max(r_min, (log_u_ - log_lambda_[top]) / a[top]);
    double p = spec_.radial().tail(upper_root(a, hi));
    if (g0 > 0.0) p += 1.0 - spec_.radial().tail(lower_root(a, r_min));
    return p;
  }

 private:
  struct Eval {
    double g, dg, d2g;
  };

  Eval eval(std::span<const double> a, double r) const {
    const std::size_t d = a.size();
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < d; ++k) m = std::max(m, log_lambda_[k] + r * a[k]);
    double s = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double w = std::exp(log_lambda_[k] + r * a[k] - m);
      s += w;
      s1 += w * a[k];
      s2 += w * a[k] * a[k];
    }
    const double mean = s1 / s;
    return {m + std::log(s) - log_u_, mean, std::max(0.0, s2 / s - mean * mean)};
  }

  // Newton from the right of the root of a convex increasing branch: iterates
  // decrease monotonically onto the root.
  double upper_root(std::span<const double> a, double r) const {
    for (int it = 0; it < 200; ++it) {
      const Eval e = eval(a, r);
      if (e.g <= 0.0 || !(e.dg > 0.0)) return r;
      const double step = e.g / e.dg;
      r -= step;
      if (step <= 1e-15 * std::max(1.0, std::abs(r))) return r;
    }
    return r;
  }

  // Newton from r = 0 on the decreasing branch, where g(0) > 0.
  double lower_root(std::span<const double> a, double limit) const {
    double r = 0.0;
    for (int it = 0; it < 200; ++it) {
      const Eval e = eval(a, r);
      if (e.g <= 0.0 || !(e.dg < 0.0)) return r;
      const double step = -e.g / e.dg;
      r = std::min(r + step, limit);
      if (step <= 1e-15 * std::max(1.0, std::abs(r)) || r == limit) return r;
    }
    return r;
  }

  double upper_bracket_decreasing(std::span<const double> a) const {
    double hi = 1.0;
    while (eval(a, hi).g > 0.0 && hi < 1e6) hi *= 2.0;
    return hi;
  }

  // Minimiser of convex g on [0, inf) when g'(0) < 0 and some a_i > 0.
  double argmin(std::span<const double> a) const {
    double lo = 0.0, hi = 1.0;
    while (eval(a, hi).dg < 0.0) {
      lo = hi;
      hi *= 2.0;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (eval(a, mid).dg < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  const ModelSpec& spec_;
  double log_u_;
  std::vector<double> log_lambda_;
};

struct RadialKernel {
  const ModelSpec& spec;
  RadialSolver solver;
  static constexpr bool counts_hits = false;

  RadialKernel(const ModelSpec& s, double u) : spec(s), solver(s, u) {}

  double operator()(DrawContext& ctx, std::span<double> a) const {
    const std::size_t d = spec.dim();
    std::span<double> dir(ctx.work.data(), d);
    draw_direction(ctx, dir);
    const Matrix& l = spec.cholesky();
    for (std::size_t i = 0; i < d; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k <= i; ++k) s += l(i, k) * dir[k];
      a[i] = spec.beta(i) * spec.gamma() * s;
    }
    return solver.probability(a);
  }
};

template <class Kernel>
ChunkStats run_chunk(const Kernel& kernel, std::size_t d, std::uint64_t seed, std::uint64_t chunk,
                     std::uint64_t n) {
  const std::uint64_t begin = chunk * kChunkSize;
  const std::uint64_t end = std::min<std::uint64_t>(n, begin + kChunkSize);
  DrawContext ctx(chunk_seed(seed, chunk), d);
  std::vector<double> scratch(d);
  std::vector<double> values;
  values.reserve(end - begin);
  for (std::uint64_t i = begin; i < end; ++i) values.push_back(kernel(ctx, scratch));

  ChunkStats st;
  st.count = values.size();
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  st.mean = sum.value() / static_cast<double>(st.count);
  CompensatedSum dev;
  for (double v : values) dev.add((v - st.mean) * (v - st.mean));
  st.m2 = dev.value();
  if constexpr (Kernel::counts_hits)
    for (double v : values) st.hits += v > 0.5 ? 1 : 0;
  return st;
}

MCEstimate finish(const ChunkStats& total, Estimator estimator, std::uint64_t seed,
                  Clock::time_point start) {
  MCEstimate out;
  out.n = total.count;
  out.estimator = estimator;
  out.seed = seed;
  const double n = static_cast<double>(total.count);
  if (estimator == Estimator::crude) {
    out.value = static_cast<double>(total.hits) / n;
    out.std_error = std::sqrt(out.value * (1.0 - out.value) / n);
  } else {
    out.value = total.mean;
    out.std_error = total.count > 1 ? std::sqrt(total.m2 / (n - 1.0) / n) : 0.0;
  }
  out.elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

template <class Kernel>
MCEstimate run(const Kernel& kernel, const ModelSpec& spec, std::uint64_t n, std::uint64_t seed,
               Estimator estimator, Execution execution, int workers) {
  if (n < 1) throw DomainError("Monte Carlo sample count n must be >= 1");
  const auto start = Clock::now();
  const std::uint64_t chunks = (n + kChunkSize - 1) / kChunkSize;
  std::vector<ChunkStats> parts(chunks);
  if (execution == Execution::serial) {
    for (std::uint64_t c = 0; c < chunks; ++c) parts[c] = run_chunk(kernel, spec.dim(), seed, c, n);
  } else {
    const int threads = resolve_workers(workers);
#pragma omp parallel for num_threads(threads) schedule(dynamic)
    for (std::uint64_t c = 0; c < chunks; ++c) parts[c] = run_chunk(kernel, spec.dim(), seed, c, n);
  }
  ChunkStats total;
  for (const auto& p : parts) total.merge(p);
  return finish(total, estimator, seed, start);
}

void require_u(double u) {
  if (std::isnan(u)) throw DomainError("threshold u must not be NaN");
}

MCEstimate dispatch(const ModelSpec& spec, double u, std::uint64_t n, std::uint64_t seed,
                    Estimator estimator, Execution execution, int workers) {
  require_u(u);
  switch (estimator) {
    case Estimator::crude:
      return run(CrudeKernel{spec, u}, spec, n, seed, estimator, execution, workers);
    case Estimator::conditional_max: {
      if (!spec.is_lognormal())
        throw WrongRadialLaw("conditional_max estimator needs a Gaussian copula (chi radius with d dof)");
      if (n < 1) throw DomainError("Monte Carlo sample count n must be >= 1");
      if (spec.dim() == 1) {
        // No conditioning variables: the conditional probability is the answer.
        const auto start = Clock::now();
        ChunkStats st;
        st.count = n;
        st.mean = u > 0.0 ? marginal_tail(spec, 0, u) : 1.0;
        return finish(st, estimator, seed, start);
      }
      return run(ConditionalMaxKernel(spec, u), spec, n, seed, estimator, execution, workers);
    }
    case Estimator::conditional_radial:
      if (!(u > 0.0)) {
        if (n < 1) throw DomainError("Monte Carlo sample count n must be >= 1");
        ChunkStats st;
        st.count = n;
        st.mean = 1.0;
        return finish(st, estimator, seed, Clock::now());
      }
      return run(RadialKernel(spec, u), spec, n, seed, estimator, execution, workers);
  }
  throw InvalidParams("unknown estimator");
}

}  // namespace

MCEstimate crude_mc(const ModelSpec& spec, double u, std::uint64_t n, std::uint64_t seed,
                    int workers) {
  return dispatch(spec, u, n, seed, Estimator::crude, Execution::parallel, workers);
}

MCEstimate conditional_max_mc(const ModelSpec& spec, double u, std::uint64_t n,
                              std::uint64_t seed, int workers) {
  return dispatch(spec, u, n, seed, Estimator::conditional_max, Execution::parallel, workers);
}

MCEstimate conditional_radial_mc(const ModelSpec& spec, double u, std::uint64_t n,
                                 std::uint64_t seed, int workers) {
  return dispatch(spec, u, n, seed, Estimator::conditional_radial, Execution::parallel, workers);
}

MCEstimate estimate(const ModelSpec& spec, double u, const MCOptions& opts) {
  return dispatch(spec, u, opts.n, opts.seed, opts.estimator, opts.execution, opts.workers);
}

std::vector<MCEstimate> mc_table(const ModelSpec& spec, std::span<const double> u_list,
                                 const MCOptions& opts) {
  if (u_list.empty()) throw DomainError("mc_table: u_list must not be empty");
  std::vector<MCEstimate> out;
  for (std::size_t k = 0; k < u_list.size(); ++k) {
    MCOptions row = opts;
    row.seed = opts.seed ^ static_cast<std::uint64_t>(k);
    out.push_back(estimate(spec, u_list[k], row));
  }
  return out;
}

double radial_conditional_probability(const ModelSpec& spec, std::span<const double> direction,
                                      double u) {
  if (direction.size() != spec.dim()) throw DomainError("direction has the wrong dimension");
  if (!(u > 0.0)) return 1.0;
  const std::size_t d = spec.dim();
  std::vector<double> a(d);
  const Matrix& l = spec.cholesky();
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k <= i; ++k) s += l(i, k) * direction[k];
    a[i] = spec.beta(i) * spec.gamma() * s;
  }
  return RadialSolver(spec, u).probability(a);
}

namespace reference {

MCEstimate estimate_serial(const ModelSpec& spec, double u, std::uint64_t n, std::uint64_t seed,
                           Estimator estimator) {
  return dispatch(spec, u, n, seed, estimator, Execution::serial, 1);
}

}  // namespace reference

}  // namespace tailsum
