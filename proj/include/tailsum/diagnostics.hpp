#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tailsum/asymptotics.hpp"
#include "tailsum/montecarlo.hpp"

namespace tailsum {

/// One row of a results table. MC-derived fields are NaN when no simulation ran.
struct DiagnosticsRow {
  double u = 0.0;
  double asympt1 = 0.0;
  double asympt2 = 0.0;
  double mc = 0.0;
  double mc_stderr = 0.0;
  double ratio1 = 0.0;  ///< mc / asympt1
  double ratio2 = 0.0;  ///< mc / asympt2
  double epsilon = 0.0;
  double exp_epsilon = 0.0;
  double rho_hat = 0.0;
};

/// rho_hat = 1 - log(u / e_j*(u)) / log u; for standard log-normal margins
/// this is 1 - log(log u)/log u. Requires u > max(1, lambda_j).
double rho_hat(const ModelSpec& spec, std::size_t j, double u);

struct EpsilonMeasure {
  double epsilon = 0.0;
  double exp_epsilon = 0.0;
};

/// Solves rho + c sqrt(1 - rho^2) sqrt(1/theta^2 - 1) = (beta_j/beta_i) log(eps e_i*(u)) / log u
/// for eps, with rho = sigma_ij and theta = log u / log(u + e(u)).
EpsilonMeasure epsilon_measure(const ModelSpec& spec, std::size_t i, std::size_t j, double u,
                               double c);

struct TableOptions {
  std::optional<MCOptions> mc;  ///< no MC column when empty
  double epsilon_c = 1.0;
  Variant variant = Variant::density_form;
};

std::vector<DiagnosticsRow> build_table(const ModelSpec& spec, std::span<const double> u_list,
                                        const TableOptions& opts);

}  // namespace tailsum
