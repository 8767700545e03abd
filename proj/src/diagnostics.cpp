#include "tailsum/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "tailsum/errors.hpp"

namespace tailsum {

double rho_hat(const ModelSpec& spec, std::size_t j, double u) {
  if (j >= spec.dim()) throw DomainError("rho_hat: margin index out of range");
  if (!(u > 1.0) || !(u > spec.lambda(j))) throw DomainError("rho_hat: u must exceed max(1, lambda_j)");
  const double log_u = std::log(u);
  return 1.0 - std::log(u / e_star(j, u, spec.scaling())) / log_u;
}

EpsilonMeasure epsilon_measure(const ModelSpec& spec, std::size_t i, std::size_t j, double u,
                               double c) {
  if (i >= spec.dim() || j >= spec.dim() || i == j)
    throw DomainError("epsilon_measure: needs two distinct margins");
  if (!(u > 1.0)) throw DomainError("epsilon_measure: u must exceed 1");
  const double rho = spec.sigma()(i, j);
  if (!(std::abs(rho) < 1.0)) throw DomainError("epsilon_measure: |rho| must be < 1");
  const double log_u = std::log(u);
  const double theta = log_u / std::log(u + e_of(u, spec.radial()));
  const double lhs = rho + c * std::sqrt(1.0 - rho * rho) * std::sqrt(1.0 / (theta * theta) - 1.0);
  const double log_eps = spec.beta(i) / spec.beta(j) * log_u * lhs - std::log(e_star(i, u, spec.scaling()));
  EpsilonMeasure out;
  out.epsilon = std::exp(log_eps);
  out.exp_epsilon = std::exp(out.epsilon);
  return out;
}

std::vector<DiagnosticsRow> build_table(const ModelSpec& spec, std::span<const double> u_list,
                                        const TableOptions& opts) {
  if (u_list.empty()) throw DomainError("build_table: u_list must not be empty");
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<DiagnosticsRow> rows(u_list.size());
  // Pair (i, j) = (second, first) margin for the epsilon column.
  const bool has_pair = spec.dim() >= 2;

  for (std::size_t k = 0; k < u_list.size(); ++k) {
    DiagnosticsRow& row = rows[k];
    row.u = u_list[k];
    const TailApproximation approx = approximate(spec, row.u, opts.variant);
    row.asympt1 = approx.first_order;
    row.asympt2 = approx.second_order;
    if (has_pair) {
      const EpsilonMeasure em = epsilon_measure(spec, 1, 0, row.u, opts.epsilon_c);
      row.epsilon = em.epsilon;
      row.exp_epsilon = em.exp_epsilon;
    } else {
      row.epsilon = row.exp_epsilon = nan;
    }
    row.rho_hat = rho_hat(spec, 0, row.u);
    row.mc = row.mc_stderr = row.ratio1 = row.ratio2 = nan;
  }

  if (opts.mc) {
    const auto estimates = mc_table(spec, u_list, *opts.mc);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      rows[k].mc = estimates[k].value;
      rows[k].mc_stderr = estimates[k].std_error;
      rows[k].ratio1 = rows[k].mc / rows[k].asympt1;
      rows[k].ratio2 = rows[k].mc / rows[k].asympt2;
    }
  }
  return rows;
}

}  // namespace tailsum
