#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <sstream>

#include "tailsum/errors.hpp"
#include "tailsum/numerics.hpp"

namespace tailsum {

namespace {

// Kronrod 15-point abscissae; odd indices are the embedded Gauss 7 nodes.
constexpr std::array<double, 8> kXk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWk[7];
  double gauss = fc * kWg[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kXk[i];
    const double fsum = f(c - dx) + f(c + dx);
    kron += kWk[i] * fsum;
    if (i % 2 == 1) gauss += kWg[i / 2] * fsum;
  }
  return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts) {
  if (a == b) return {0.0, 0.0, 0, true};
  std::priority_queue<Segment> heap;
  Segment first = gk15(f, a, b);
  heap.push(first);
  double total = first.value;
  double err = first.error;
  int count = 1;
  auto tolerance = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };
  while (err > tolerance() && count < opts.max_intervals) {
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid == worst.a || mid == worst.b) break;
    Segment left = gk15(f, worst.a, mid);
    Segment right = gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum from the leaves to shed the running-update rounding.
  CompensatedSum value;
  double error = 0.0;
  while (!heap.empty()) {
    value.add(heap.top().value);
    error += heap.top().error;
    heap.pop();
  }
  QuadratureResult out{value.value(), error, count, false};
  out.converged = error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(out.value));
  return out;
}

double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          const QuadratureOptions& opts) {
  const QuadratureResult r = integrate(f, a, b, opts);
  if (!r.converged) {
    std::ostringstream os;
    os << "quadrature on [" << a << "," << b << "] did not converge: value " << r.value
       << ", error estimate " << r.error << " after " << r.intervals << " intervals";
    throw QuadratureError(os.str());
  }
  return r.value;
}

}  // namespace tailsum
