#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tailsum/model.hpp"

namespace tailsum {

enum class Estimator {
  crude,               ///< indicator of {X_1 + ... + X_d > u}
  conditional_max,     ///< sum_j P(X_j > max(M_j, u - S_j) | X_-j), Gaussian copula only
  conditional_radial,  ///< P(S > u | direction U), integrating R through its tail
};

std::string to_string(Estimator e);
Estimator estimator_from_string(const std::string& name);

struct MCEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;
  Estimator estimator = Estimator::crude;
  std::uint64_t seed = 0;
  double elapsed = 0.0;  ///< wall seconds

  double rel_error() const { return value > 0.0 ? std_error / value : 0.0; }
};

enum class Execution { serial, parallel };

struct MCOptions {
  std::uint64_t n = 1'000'000;
  std::uint64_t seed = 1;
  Estimator estimator = Estimator::conditional_radial;
  int workers = 0;  ///< 0: TAILSUM_THREADS or the OpenMP default
  Execution execution = Execution::parallel;
};

/// Per-chunk running statistics; merged in chunk order so the result is
/// independent of how chunks were scheduled.
struct ChunkStats {
  std::uint64_t count = 0;
  std::uint64_t hits = 0;  ///< crude estimator only
  double mean = 0.0;
  double m2 = 0.0;  ///< sum of squared deviations from mean

  void merge(const ChunkStats& other);
};

MCEstimate crude_mc(const ModelSpec& spec, double u, std::uint64_t n, std::uint64_t seed,
                    int workers = 0);

/// Throws WrongRadialLaw unless the model is log-normal (Gaussian copula).
MCEstimate conditional_max_mc(const ModelSpec& spec, double u, std::uint64_t n,
                              std::uint64_t seed, int workers = 0);

MCEstimate conditional_radial_mc(const ModelSpec& spec, double u, std::uint64_t n,
                                 std::uint64_t seed, int workers = 0);

MCEstimate estimate(const ModelSpec& spec, double u, const MCOptions& opts);

/// One estimate per threshold; row k uses seed ^ k.
std::vector<MCEstimate> mc_table(const ModelSpec& spec, std::span<const double> u_list,
                                 const MCOptions& opts);

/// P(S > u | U = direction): the radial kernel on its own, for tests.
double radial_conditional_probability(const ModelSpec& spec, std::span<const double> direction,
                                      double u);

namespace reference {

/// Single-threaded estimator: same chunk seeding and merge order as the
/// OpenMP path, without any threading. Kept as the comparison baseline.
MCEstimate estimate_serial(const ModelSpec& spec, double u, std::uint64_t n, std::uint64_t seed,
                           Estimator estimator);

}  // namespace reference

}  // namespace tailsum
