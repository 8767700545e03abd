#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace tailsum {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2Pi = 2.50662827463100050242;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

/// P(N(0,1) > x). Accurate in relative terms far into the upper tail; returns
/// a denormal/zero only once the true value is below the double range.
double std_normal_tail(double x);

/// log P(N(0,1) > x), finite for every finite x.
double log_std_normal_tail(double x);

double std_normal_pdf(double x);

/// Mills ratio P(N > x) / phi(x), computed without forming either factor for
/// large x.
double normal_mills_ratio(double x);

double lognormal_pdf(double u, double mu, double sigma);
double log_lognormal_pdf(double u, double mu, double sigma);

double gamma_function(double s);

/// Density of one coordinate of a point uniform on the unit sphere in R^d.
double sphere_marginal_density(double x, int d);

/// Gamma(d/2) / (sqrt(pi) Gamma((d-1)/2)), the normalising constant of
/// sphere_marginal_density.
double sphere_marginal_constant(int d);

/// log(sum(exp(v))) without overflow; -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> v);
double log_add_exp(double a, double b);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// ---------------------------------------------------------------------------
// Small dense linear algebra
// ---------------------------------------------------------------------------

/// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  Matrix transpose() const;
  Matrix operator*(const Matrix& rhs) const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Symmetric, unit-diagonal, positive-definite matrix. Construction does not
/// enforce the invariants; call violations() or cholesky_factor().
class CorrelationMatrix {
 public:
  CorrelationMatrix() = default;
  explicit CorrelationMatrix(Matrix m);

  static CorrelationMatrix identity(std::size_t d);
  static CorrelationMatrix equicorrelated(std::size_t d, double rho);
  static CorrelationMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t dim() const { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& matrix() const { return m_; }

  /// Re-index rows and columns: result(a, b) = this(perm[a], perm[b]).
  CorrelationMatrix permuted(std::span<const std::size_t> perm) const;

  /// Human-readable list of violated invariants; empty when valid.
  std::vector<std::string> violations() const;

  bool operator==(const CorrelationMatrix&) const = default;

 private:
  Matrix m_;
};

/// Lower-triangular L with L L^T = m. Throws NotPositiveDefinite.
Matrix cholesky_factor(const Matrix& m);
Matrix cholesky_factor(const CorrelationMatrix& m);

/// Solves (L L^T) x = b given the lower Cholesky factor L.
std::vector<double> cholesky_solve(const Matrix& lower, std::span<const double> b);

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 0.0;
  int max_intervals = 2000;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b]:
/// the interval with the largest error estimate is bisected until the total
/// error is below max(abs_tol, rel_tol * |value|).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts = {});

/// As integrate() but throws QuadratureError when the tolerance is not met.
double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          const QuadratureOptions& opts = {});

}  // namespace tailsum
