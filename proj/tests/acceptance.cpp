// Acceptance report: one PASS/FAIL line per criterion. Exits 0 once the report
// is complete; with --strict the exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "reference_tables.hpp"
#include "tailsum/asymptotics.hpp"
#include "tailsum/diagnostics.hpp"
#include "tailsum/montecarlo.hpp"
#include "tailsum/radial.hpp"

using namespace tailsum;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double round_to(double x, int sig) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*e", sig - 1, x);
  return std::stod(buf);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::cout << "criterion " << id << ": " << (pass ? "PASS" : "FAIL") << "  " << detail << "\n";
}

void note(const std::string& text) { std::cout << "    " << text << "\n"; }

const tables::Row* printed_row(double rho, double u) {
  for (const auto& t : tables::all())
    if (t.rho == rho)
      for (const auto& r : t.rows)
        if (r.u == u) return &r;
  return nullptr;
}

struct McPoint {
  double rho, u;
  MCEstimate est;
};

constexpr std::uint64_t kSeed = 20130607;

// --------------------------------------------------------------------------

void criterion1() {
  const auto t0 = Clock::now();
  int rows = 0, bad = 0;
  std::string first_bad;
  for (const auto& t : tables::all()) {
    const ModelSpec spec = ModelSpec::lognormal(2, t.rho);
    for (const auto& r : t.rows) {
      const auto a = approximate(spec, r.u, Variant::density_form);
      ++rows;
      if (round_to(a.first_order, 3) != r.asympt1 || round_to(a.second_order, 3) != r.asympt2) {
        if (!bad++) first_bad = t.name + " u=" + fmt(r.u);
      }
    }
  }
  const double elapsed = seconds_since(t0);
  std::ostringstream os;
  os << rows - bad << "/" << rows << " rows match Asympt 1 and Asympt 2 to 3 significant digits, "
     << fmt(elapsed) << " s";
  if (bad) os << " (first mismatch " << first_bad << ")";
  report(1, bad == 0 && elapsed < 1.0, os.str());
  const struct { double rho, u; } anchors[] = {{0.9, 10}, {0.5, 75}, {0.0, 300}, {-0.9, 3}, {0.9, 1e6}};
  for (const auto& a : anchors) {
    const auto v = approximate(ModelSpec::lognormal(2, a.rho), a.u);
    note("rho=" + fmt(a.rho) + " u=" + fmt(a.u) + ": " + fmt(round_to(v.first_order, 3)) + " / " +
         fmt(round_to(v.second_order, 3)));
  }
}

void criterion2() {
  int rows = 0, bad = 0;
  for (const auto& t : tables::all()) {
    const ModelSpec spec = ModelSpec::lognormal(2, t.rho);
    for (const auto& r : t.rows) {
      ++rows;
      // Printed to three significant digits (1.53 at u = 2).
      if (round_to(rho_hat(spec, 0, r.u), 3) != r.rho_hat) ++bad;
    }
  }
  const ModelSpec s = ModelSpec::lognormal(2, 0.0);
  report(2, bad == 0,
         std::to_string(rows - bad) + "/" + std::to_string(rows) + " rho_hat values match (u=10 -> " +
             fmt(rho_hat(s, 0, 10.0)) + ", u=1e6 -> " + fmt(rho_hat(s, 0, 1e6)) + ")");
}

// Half a unit in the third significant digit of a printed value.
double rounding_half_width(double printed) {
  return 0.5 * std::pow(10.0, std::floor(std::log10(printed)) - 2.0);
}

bool moderate_ok(const McPoint& p, double printed, std::string* detail) {
  const double diff = std::abs(p.est.value - printed);
  // The printed value stands for the interval it was rounded from; a precise
  // estimate is measured against that interval, not its midpoint.
  const double gap = std::max(0.0, diff - rounding_half_width(printed));
  const bool in_se = gap <= 3.0 * p.est.std_error;
  const bool in_rel = diff <= 0.05 * printed;
  const bool precise = p.est.rel_error() < 0.01;
  const bool fast = p.est.elapsed < 60.0;
  std::ostringstream os;
  os << "rho=" << fmt(p.rho) << " u=" << fmt(p.u) << ": " << fmt(p.est.value) << " vs " << fmt(printed)
     << " (" << fmt(gap / p.est.std_error) << " se outside rounding, rel " << fmt(diff / printed) << ", rel se "
     << fmt(p.est.rel_error()) << ", " << fmt(p.est.elapsed) << " s)";
  *detail = os.str();
  return in_se && in_rel && precise && fast;
}

std::vector<McPoint> criterion3(std::vector<McPoint>* radial_points) {
  const struct { double rho, u; } points[] = {{0.9, 10}, {0.9, 100}, {0.5, 50},
                                              {0.0, 10}, {0.0, 100}, {-0.9, 10}};
  std::vector<McPoint> out;
  std::vector<std::string> lines, radial_lines;
  int ok = 0, radial_ok = 0;
  for (const auto& pt : points) {
    const ModelSpec spec = ModelSpec::lognormal(2, pt.rho);
    const double printed = printed_row(pt.rho, pt.u)->mc;
    McPoint ak{pt.rho, pt.u, conditional_max_mc(spec, pt.u, 1'000'000, kSeed)};
    McPoint rad{pt.rho, pt.u, conditional_radial_mc(spec, pt.u, 1'000'000, kSeed)};
    std::string d;
    const bool pass = moderate_ok(ak, printed, &d);
    ok += pass;
    lines.push_back(std::string(pass ? "ok   " : "miss ") + d);
    const bool rpass = moderate_ok(rad, printed, &d);
    radial_ok += rpass;
    radial_lines.push_back(std::string(rpass ? "ok   " : "miss ") + d);
    out.push_back(ak);
    radial_points->push_back(rad);
  }
  report(3, ok == 6,
         "conditional_max_mc n=1e6: " + std::to_string(ok) + "/6 points within 3 se and 5% with rel se < 1%");
  for (const auto& l : lines) note(l);
  note("supplementary, conditional_radial_mc n=1e6 (not counted): " + std::to_string(radial_ok) + "/6");
  for (const auto& l : radial_lines) note(l);
  return out;
}

bool ratio2_increasing(const std::vector<double>& us, const std::vector<MCEstimate>& est,
                       std::string* detail) {
  const ModelSpec spec = ModelSpec::lognormal(2, 0.9);
  bool inc = true;
  double prev = -1.0;
  std::ostringstream os;
  for (std::size_t k = 0; k < us.size(); ++k) {
    const double r2 = est[k].value / approximate(spec, us[k]).second_order;
    os << (k ? " " : "") << fmt(r2);
    if (!(r2 > prev)) inc = false;
    prev = r2;
  }
  *detail = os.str();
  return inc;
}

std::vector<McPoint> criterion4(std::vector<McPoint>* radial_points) {
  const ModelSpec spec = ModelSpec::lognormal(2, 0.9);
  const double printed = 1.1e-10;
  const MCEstimate ak = conditional_max_mc(spec, 1e3, 10'000'000, kSeed);
  const MCEstimate rad = conditional_radial_mc(spec, 1e3, 10'000'000, kSeed);
  const bool deep_ok = std::abs(ak.value / printed - 1.0) <= 0.2;

  std::vector<double> us;
  for (const auto& r : tables::all()[0].rows) us.push_back(r.u);
  MCOptions opts;
  opts.n = 1'000'000;
  opts.seed = kSeed;
  opts.estimator = Estimator::conditional_max;
  const auto ak_rows = mc_table(spec, us, opts);
  opts.estimator = Estimator::conditional_radial;
  const auto rad_rows = mc_table(spec, us, opts);
  std::string ak_r2, rad_r2;
  const bool ak_inc = ratio2_increasing(us, ak_rows, &ak_r2);
  const bool rad_inc = ratio2_increasing(us, rad_rows, &rad_r2);

  report(4, deep_ok && ak_inc,
         "conditional_max_mc rho=0.9 u=1e3 n=1e7: " + fmt(ak.value) + " (rel se " + fmt(ak.rel_error()) +
             ") vs 1.1e-10, ratio " + fmt(ak.value / printed) + "; Ratio 2 over u=10..1e6 " +
             (ak_inc ? "increasing" : "not increasing"));
  note("conditional_max Ratio 2: " + ak_r2);
  note("printed Ratio 2: 0.74 ... 2.49 ... 21.7");
  note("supplementary, conditional_radial_mc (not counted): u=1e3 n=1e7 " + fmt(rad.value) + " (rel se " +
       fmt(rad.rel_error()) + "), ratio " + fmt(rad.value / printed) + "; Ratio 2 " +
       (rad_inc ? "increasing" : "not increasing") + ": " + rad_r2);
  radial_points->push_back({0.9, 1e3, rad});
  return {{0.9, 1e3, ak}};
}

void criterion5(const std::vector<McPoint>& ak, const std::vector<McPoint>& radial) {
  auto count = [](const std::vector<McPoint>& pts, std::vector<std::string>* lines) {
    int ok = 0;
    for (const auto& p : pts) {
      const auto a = approximate(ModelSpec::lognormal(2, p.rho), p.u);
      const double e1 = std::abs(a.first_order - p.est.value);
      const double e2 = std::abs(a.second_order - p.est.value);
      ok += e2 < e1;
      lines->push_back(std::string(e2 < e1 ? "ok   " : "miss ") + "rho=" + fmt(p.rho) + " u=" + fmt(p.u) +
                       ": |A2-MC| " + fmt(e2) + " vs |A1-MC| " + fmt(e1));
    }
    return ok;
  };
  std::vector<std::string> lines, radial_lines;
  const int ok = count(ak, &lines);
  const int rok = count(radial, &radial_lines);
  report(5, ok == static_cast<int>(ak.size()),
         "second order closer to conditional_max MC on " + std::to_string(ok) + "/" +
             std::to_string(ak.size()) + " points");
  for (const auto& l : lines) note(l);
  note("supplementary, conditional_radial MC (not counted): " + std::to_string(rok) + "/" +
       std::to_string(radial.size()));
  for (const auto& l : radial_lines) note(l);
}

void criterion6() {
  double worst = 0.0;
  int cases = 0;
  for (int d = 2; d <= 6; ++d)
    for (double rho : {-0.9, 0.0, 0.5, 0.9}) {
      if (rho <= -1.0 / (d - 1)) continue;  // not a correlation matrix
      const ModelSpec spec = ModelSpec::lognormal(d, rho);
      for (double u : {10.0, 1e3, 1e6}) {
        const double a = equicorrelated_correction(d, rho, u);
        const double b = lognormal_correction(spec, u);
        worst = std::max(worst, std::abs(a / b - 1.0));
        ++cases;
      }
    }
  report(6, worst <= 1e-12,
         std::to_string(cases) + " cases, max relative difference " + fmt(worst) +
             " (rho=-0.9 skipped for d>=3: not positive definite)");
}

void criterion7() {
  auto close = [](double a, double sa, double b, double sb) {
    return std::abs(a - b) <= 3.0 * std::sqrt(sa * sa + sb * sb);
  };
  const ModelSpec spec = ModelSpec::lognormal(2, 0.0);
  const double u = 5.0;
  const MCEstimate crude = crude_mc(spec, u, 100'000'000, kSeed);
  const MCEstimate ak = conditional_max_mc(spec, u, 1'000'000, kSeed);
  const MCEstimate rad = conditional_radial_mc(spec, u, 1'000'000, kSeed);
  const double quad = oracle::bivariate_lognormal_sum_tail(0.0, u);
  const bool pairs = close(crude.value, crude.std_error, ak.value, ak.std_error) &&
                     close(crude.value, crude.std_error, rad.value, rad.std_error) &&
                     close(ak.value, ak.std_error, rad.value, rad.std_error) &&
                     close(quad, 0.0, crude.value, crude.std_error) &&
                     close(quad, 0.0, ak.value, ak.std_error) && close(quad, 0.0, rad.value, rad.std_error);
  const double quad_rel = std::abs(quad / crude.value - 1.0);
  report(7, pairs && quad_rel < 0.005,
         "rho=0 u=5: crude(1e8) " + fmt(crude.value) + " +- " + fmt(crude.std_error) + ", conditional_max " +
             fmt(ak.value) + " +- " + fmt(ak.std_error) + ", conditional_radial " + fmt(rad.value) + " +- " +
             fmt(rad.std_error) + ", quadrature " + fmt(quad) + " (rel to crude " + fmt(quad_rel) + ")");
  const ModelSpec neg = ModelSpec::lognormal(2, -0.9);
  note("rho=-0.9 u=5: conditional_max " + fmt(conditional_max_mc(neg, u, 1'000'000, kSeed).value) +
       ", conditional_radial " + fmt(conditional_radial_mc(neg, u, 1'000'000, kSeed).value) + ", quadrature " +
       fmt(oracle::bivariate_lognormal_sum_tail(-0.9, u)) + ", printed 0.121");
}

void criterion8() {
  const ModelSpec spec = ModelSpec::lognormal(2, 0.0);
  const std::vector<double> xs = {-2, -1, 0, 1, 2};
  const double us[] = {1e4, 1e8};
  const auto rows = probe_margin_mda(spec.scaling(), 0, us, xs);
  double lo = 0.0, hi = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    lo = std::max(lo, rows[k].rel_error());
    hi = std::max(hi, rows[k + xs.size()].rel_error());
  }
  report(8, hi < 0.15 && hi < lo,
         "max relative deviation from exp(-x): " + fmt(lo) + " at u=1e4, " + fmt(hi) + " at u=1e8");
}

void criterion9() {
  const auto t0 = Clock::now();
  const auto lo = verify_angular_lemma(RadialLaw::chi(3), 1.0, 1.0, 1.0, 3, 1e4);
  const auto hi = verify_angular_lemma(RadialLaw::chi(3), 1.0, 1.0, 1.0, 3, 1e8);
  const double elapsed = seconds_since(t0);
  report(9,
         hi.ratio >= 0.85 && hi.ratio <= 1.15 && std::abs(hi.ratio - 1.0) < std::abs(lo.ratio - 1.0) &&
             elapsed < 10.0,
         "integral/asymptotic " + fmt(lo.ratio) + " at u=1e4, " + fmt(hi.ratio) + " at u=1e8, " +
             fmt(elapsed) + " s");
}

std::string strip_wall_time(const std::string& s) {
  std::istringstream in(s);
  std::string line, out;
  while (std::getline(in, line))
    if (line.rfind("wall_time_s", 0) != 0) out += line + "\n";
  return out;
}

void criterion10(const std::string& config_dir) {
  bool same = true;
  int runs = 0;
  for (const char* estimator : {"conditional", "radial", "crude"}) {
    std::string first;
    for (const char* workers : {"1", "2", "8"}) {
      std::ostringstream out, err;
      const int code = cli::run({"tailsum", "mc", "--config", config_dir + "/table1.json", "--u", "10,100",
                                 "--n", "300000", "--seed", "42", "--estimator", estimator, "--workers",
                                 workers},
                                out, err);
      ++runs;
      const std::string text = strip_wall_time(out.str());
      if (code != 0) same = false;
      if (first.empty())
        first = text;
      else if (text != first)
        same = false;
    }
  }
  report(10, same,
         "mc output identical for 1, 2 and 8 workers (" + std::to_string(runs) + " runs, three estimators)");
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  std::string config_dir = TAILSUM_CONFIG_DIR;
  for (int k = 1; k < argc; ++k) {
    const std::string a = argv[k];
    if (a == "--strict")
      strict = true;
    else
      config_dir = a;
  }
  const auto t0 = Clock::now();
  criterion1();
  criterion2();
  std::vector<McPoint> radial_points;
  auto ak_points = criterion3(&radial_points);
  const auto deep = criterion4(&radial_points);
  ak_points.insert(ak_points.end(), deep.begin(), deep.end());
  criterion5(ak_points, radial_points);
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10(config_dir);
  std::cout << "summary: " << 10 - failures << "/10 criteria pass (" << fmt(seconds_since(t0)) << " s)\n";
  return strict ? failures : 0;
}
