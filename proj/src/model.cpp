#include "tailsum/model.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "tailsum/errors.hpp"

namespace tailsum {

std::vector<std::string> validate(const ModelParams& params) {
  std::vector<std::string> out;
  const std::size_t d = params.dim();
  if (d < 1) {
    out.emplace_back("dimension d >= 1 (got 0)");
    return out;
  }
  auto check_vector = [&](const std::vector<double>& v, const char* name) {
    if (v.size() != d) {
      std::ostringstream os;
      os << name << " has length " << v.size() << ", expected d = " << d;
      out.push_back(os.str());
      return;
    }
    for (std::size_t i = 0; i < d; ++i)
      if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
        std::ostringstream os;
        os << name << "[" << i << "] must be positive and finite (got " << v[i] << ")";
        out.push_back(os.str());
      }
  };
  check_vector(params.lambda, "lambda");
  check_vector(params.beta, "beta");
  if (!(params.gamma > 0.0) || !std::isfinite(params.gamma)) {
    std::ostringstream os;
    os << "gamma must be positive and finite (got " << params.gamma << ")";
    out.push_back(os.str());
  }
  for (auto& v : params.sigma.violations()) out.push_back(std::move(v));
  return out;
}

namespace {

bool mda_probe_converges(const RadialLaw& law) {
  const double xs[] = {-1.0, 1.0};
  const double us[] = {10.0, 100.0};
  const auto rows = probe_mda_limit(law, us, xs);
  for (std::size_t k = 0; k < 2; ++k) {
    const double near = rows[k].rel_error();
    const double far = rows[2 + k].rel_error();
    if (!(far <= near) || !(far < 0.05)) return false;
  }
  return true;
}

}  // namespace

ModelSpec ModelSpec::create(const ModelParams& params, bool strict) {
  auto problems = validate(params);
  if (strict && problems.empty() && !mda_probe_converges(params.radial))
    problems.emplace_back("radial law fails the Gumbel MDA probe");
  if (!problems.empty()) {
    std::ostringstream os;
    os << "invalid model:";
    for (const auto& p : problems) os << "\n  - " << p;
    throw InvalidParams(os.str());
  }
  const std::size_t d = params.dim();
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (params.beta[a] != params.beta[b]) return params.beta[a] > params.beta[b];
    return params.lambda[a] > params.lambda[b];
  });

  ModelSpec spec;
  spec.perm_ = order;
  for (std::size_t k : order) {
    spec.lambda_.push_back(params.lambda[k]);
    spec.beta_.push_back(params.beta[k]);
  }
  spec.gamma_ = params.gamma;
  spec.sigma_ = params.sigma.permuted(order);
  spec.radial_ = params.radial;
  spec.chol_ = cholesky_factor(spec.sigma_);
  spec.bundle_ = ScalingBundle{spec.radial_, d, spec.lambda_, spec.beta_, spec.gamma_};
  return spec;
}

ModelSpec ModelSpec::lognormal(std::size_t d, double rho) {
  ModelParams p;
  p.lambda.assign(d, 1.0);
  p.beta.assign(d, 1.0);
  p.gamma = 1.0;
  p.sigma = CorrelationMatrix::equicorrelated(d, rho);
  p.radial = RadialLaw::chi(static_cast<int>(d));
  return create(p);
}

std::size_t ModelSpec::stored_index(std::size_t k) const {
  const auto it = std::find(perm_.begin(), perm_.end(), k);
  if (it == perm_.end()) throw DomainError("stored_index: margin index out of range");
  return static_cast<std::size_t>(it - perm_.begin());
}

bool ModelSpec::is_lognormal() const {
  return radial_.kind() == RadialKind::chi && static_cast<std::size_t>(radial_.chi_dim()) == dim();
}

ModelParams ModelSpec::params() const { return {lambda_, beta_, gamma_, sigma_, radial_}; }

// ---------------------------------------------------------------------------

double log_marginal_tail(const ModelSpec& spec, std::size_t j, double u) {
  return margin_log_tail(spec.scaling(), j, u);
}

double marginal_tail(const ModelSpec& spec, std::size_t j, double u) {
  return std::exp(log_marginal_tail(spec, j, u));
}

double log_marginal_pdf(const ModelSpec& spec, std::size_t j, double u) {
  if (!(u > 0.0)) throw DomainError("marginal_pdf: u must be positive");
  if (spec.is_lognormal())
    return log_lognormal_pdf(u, std::log(spec.lambda(j)), spec.beta(j) * spec.gamma());
  return std::log(marginal_pdf(spec, j, u));
}

double marginal_pdf(const ModelSpec& spec, std::size_t j, double u) {
  if (!(u > 0.0)) throw DomainError("marginal_pdf: u must be positive");
  if (spec.is_lognormal()) return std::exp(log_marginal_pdf(spec, j, u));
  const double h = 1e-5 * u;
  return (marginal_tail(spec, j, u - h) - marginal_tail(spec, j, u + h)) / (2.0 * h);
}

// ---------------------------------------------------------------------------

std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk) {
  // SplitMix64 output function on a counter offset by the chunk index.
  std::uint64_t z = seed + (chunk + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("TAILSUM_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1, omp_get_max_threads());
}

void draw_direction(DrawContext& ctx, std::span<double> out) {
  for (;;) {
    double norm2 = 0.0;
    for (double& v : out) {
      v = ctx.normal(ctx.eng);
      norm2 += v * v;
    }
    if (norm2 > 0.0) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (double& v : out) v *= inv;
      return;
    }
  }
}

void draw_log_vector(const ModelSpec& spec, DrawContext& ctx, std::span<double> y) {
  const std::size_t d = spec.dim();
  std::span<double> dir(ctx.work.data(), d);
  draw_direction(ctx, dir);
  const double r = spec.radial().draw(ctx.eng);
  const Matrix& l = spec.cholesky();
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k <= i; ++k) s += l(i, k) * dir[k];
    y[i] = r * s;
  }
}

SampleBatch sample(const ModelSpec& spec, std::size_t n, std::uint64_t seed, int workers) {
  if (n < 1) throw DomainError("sample: n must be >= 1");
  const std::size_t d = spec.dim();
  SampleBatch batch;
  batch.n = n;
  batch.d = d;
  batch.seed = seed;
  batch.values.resize(n * d);
  const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
  const int threads = resolve_workers(workers);

#pragma omp parallel for num_threads(threads) schedule(dynamic)
  for (std::size_t c = 0; c < chunks; ++c) {
    DrawContext ctx(chunk_seed(seed, c), d);
    const std::size_t begin = c * kChunkSize;
    const std::size_t end = std::min(n, begin + kChunkSize);
    for (std::size_t i = begin; i < end; ++i) {
      std::span<double> row(batch.values.data() + i * d, d);
      draw_log_vector(spec, ctx, row);
      for (std::size_t k = 0; k < d; ++k)
        row[k] = spec.lambda(k) * std::exp(spec.beta(k) * spec.gamma() * row[k]);
    }
  }
  return batch;
}

}  // namespace tailsum
