#include "tailsum/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tailsum/errors.hpp"

namespace tailsum {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Beyond this point 0.5*erfc(x/sqrt2) drifts into the denormal range.
constexpr double kErfcSwitch = 26.0;

// Mills ratio Phi-bar(x)/phi(x) by backward evaluation of its continued
// fraction; only used for x >= kErfcSwitch where 60 terms are plenty.
double mills_ratio_cf(double x) {
  double t = x;
  for (int k = 60; k >= 1; --k) t = x + k / t;
  return 1.0 / t;
}

}  // namespace

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

double normal_mills_ratio(double x) {
  if (x >= kErfcSwitch) return mills_ratio_cf(x);
  return std::exp(log_std_normal_tail(x) + 0.5 * x * x + kLogSqrt2Pi);
}

double std_normal_tail(double x) {
  if (x < kErfcSwitch) return 0.5 * std::erfc(x / std::numbers::sqrt2);
  return std::exp(log_std_normal_tail(x));
}

double log_std_normal_tail(double x) {
  if (x < kErfcSwitch) return std::log(0.5 * std::erfc(x / std::numbers::sqrt2));
  return -0.5 * x * x - kLogSqrt2Pi + std::log(mills_ratio_cf(x));
}

double log_lognormal_pdf(double u, double mu, double sigma) {
  if (!(u > 0.0)) throw DomainError("lognormal_pdf: u must be positive");
  if (!(sigma > 0.0)) throw DomainError("lognormal_pdf: sigma must be positive");
  const double z = (std::log(u) - mu) / sigma;
  return -0.5 * z * z - std::log(u * sigma) - kLogSqrt2Pi;
}

double lognormal_pdf(double u, double mu, double sigma) {
  return std::exp(log_lognormal_pdf(u, mu, sigma));
}

double gamma_function(double s) {
  if (!(s > 0.0)) throw DomainError("gamma_function: argument must be positive");
  return std::tgamma(s);
}

double sphere_marginal_constant(int d) {
  if (d < 2) throw DomainError("sphere_marginal_density: d must be >= 2");
  return std::exp(std::lgamma(0.5 * d) - std::lgamma(0.5 * (d - 1))) / std::sqrt(kPi);
}

double sphere_marginal_density(double x, int d) {
  if (!(std::abs(x) < 1.0)) throw DomainError("sphere_marginal_density: |x| must be < 1");
  return sphere_marginal_constant(d) * std::pow(1.0 - x * x, 0.5 * (d - 3));
}

double log_sum_exp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
}

// ---------------------------------------------------------------------------

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  if (cols_ != rhs.rows_) throw DomainError("Matrix: dimension mismatch");
  Matrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

CorrelationMatrix::CorrelationMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw DomainError("CorrelationMatrix: matrix must be square");
}

CorrelationMatrix CorrelationMatrix::identity(std::size_t d) {
  return CorrelationMatrix(Matrix::identity(d));
}

CorrelationMatrix CorrelationMatrix::equicorrelated(std::size_t d, double rho) {
  Matrix m(d, d, rho);
  for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
  return CorrelationMatrix(std::move(m));
}

CorrelationMatrix CorrelationMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t d = rows.size();
  Matrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    if (rows[i].size() != d) throw DomainError("CorrelationMatrix: rows must have length d");
    for (std::size_t j = 0; j < d; ++j) m(i, j) = rows[i][j];
  }
  return CorrelationMatrix(std::move(m));
}

CorrelationMatrix CorrelationMatrix::permuted(std::span<const std::size_t> perm) const {
  const std::size_t d = dim();
  Matrix m(d, d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) m(a, b) = m_(perm[a], perm[b]);
  return CorrelationMatrix(std::move(m));
}

std::vector<std::string> CorrelationMatrix::violations() const {
  std::vector<std::string> out;
  const std::size_t d = dim();
  if (d == 0) {
    out.emplace_back("correlation matrix is empty");
    return out;
  }
  bool finite = true;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) finite = finite && std::isfinite(m_(i, j));
  if (!finite) {
    out.emplace_back("correlation matrix has non-finite entries");
    return out;
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (m_(i, i) != 1.0) {
      std::ostringstream os;
      os << "unit diagonal: sigma(" << i << "," << i << ") = " << m_(i, i);
      out.push_back(os.str());
    }
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      if (m_(i, j) != m_(j, i)) {
        std::ostringstream os;
        os << "symmetric: sigma(" << i << "," << j << ") != sigma(" << j << "," << i << ")";
        out.push_back(os.str());
      }
      if (m_(i, j) < -1.0 || m_(i, j) > 1.0) {
        std::ostringstream os;
        os << "off-diagonal in [-1,1]: sigma(" << i << "," << j << ") = " << m_(i, j);
        out.push_back(os.str());
      }
    }
  if (out.empty()) {
    try {
      (void)cholesky_factor(m_);
    } catch (const NotPositiveDefinite&) {
      out.emplace_back("positive definite: Cholesky factorization failed");
    }
  }
  return out;
}

Matrix cholesky_factor(const Matrix& m) {
  const std::size_t n = m.rows();
  if (m.cols() != n) throw DomainError("cholesky_factor: matrix must be square");
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = m(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0)) throw NotPositiveDefinite("cholesky_factor: non-positive pivot");
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

Matrix cholesky_factor(const CorrelationMatrix& m) { return cholesky_factor(m.matrix()); }

std::vector<double> cholesky_solve(const Matrix& lower, std::span<const double> b) {
  const std::size_t n = lower.rows();
  if (b.size() != n) throw DomainError("cholesky_solve: size mismatch");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= lower(i, k) * y[k];
    y[i] = s / lower(i, i);
  }
  std::vector<double> x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= lower(k, ii) * x[k];
    x[ii] = s / lower(ii, ii);
  }
  return x;
}

}  // namespace tailsum
