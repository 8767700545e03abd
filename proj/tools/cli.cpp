#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "tailsum/asymptotics.hpp"
#include "tailsum/config.hpp"
#include "tailsum/diagnostics.hpp"
#include "tailsum/errors.hpp"
#include "tailsum/montecarlo.hpp"

namespace tailsum::cli {

namespace {

struct Overrides {
  std::string config_path;
  std::vector<double> u;
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> estimator;
  std::optional<std::string> variant;
  std::optional<double> epsilon_c;
  std::optional<std::string> out;
  std::optional<std::string> format;
  int workers = 0;
  bool no_mc = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "model/run configuration (JSON)")->required();
  cmd->add_option("--u", o.u, "threshold(s), comma-separated")->delimiter(',');
}

void add_mc(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--n", o.n, "Monte Carlo sample count");
  cmd->add_option("--seed", o.seed, "Monte Carlo seed");
  cmd->add_option("--estimator", o.estimator, "crude | conditional | radial");
  cmd->add_option("--workers", o.workers, "worker threads (0: TAILSUM_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
}

RunConfig resolve(const Overrides& o) {
  RunConfig cfg = load_config(o.config_path);
  if (!o.u.empty()) cfg.u_list = o.u;
  if (o.n) cfg.mc.n = *o.n;
  if (o.seed) cfg.mc.seed = *o.seed;
  if (o.estimator) {
    try {
      cfg.mc.estimator = estimator_from_string(*o.estimator);
    } catch (const InvalidParams& e) {
      throw ConfigError(e.what());
    }
  }
  if (o.variant && *o.variant != "both") {
    try {
      cfg.variant = variant_from_string(*o.variant);
    } catch (const InvalidParams& e) {
      throw ConfigError(e.what());
    }
  }
  if (o.epsilon_c) cfg.epsilon_c = *o.epsilon_c;
  if (o.out) cfg.output_path = *o.out;
  if (o.format) cfg.format = output_format_from_string(*o.format);
  return cfg;
}

void require_u_list(const RunConfig& cfg) {
  if (cfg.u_list.empty()) throw ConfigError("no thresholds: give --u or 'u_list' in the config");
  for (double u : cfg.u_list)
    if (!(u > 0.0) || !std::isfinite(u)) throw ConfigError("thresholds must be positive and finite");
}

MCOptions mc_options(const RunConfig& cfg, int workers) {
  if (cfg.mc.n < 1) throw ConfigError("Monte Carlo sample count n must be >= 1");
  MCOptions opts;
  opts.workers = workers;
  opts.n = cfg.mc.n;
  opts.seed = cfg.mc.seed;
  opts.estimator = cfg.mc.estimator;
  return opts;
}

void print_value(std::ostream& out, const std::string& name, double value, double log_value) {
  out << name << " = " << format_full(value) << "  (log10 " << format_full(log_value / std::log(10.0))
      << ")\n";
}

int cmd_table(const Overrides& o, std::ostream& out) {
  const RunConfig cfg = resolve(o);
  require_u_list(cfg);
  const ModelSpec spec = ModelSpec::create(cfg.model);
  TableOptions opts;
  opts.epsilon_c = cfg.epsilon_c;
  opts.variant = cfg.variant;
  if (!o.no_mc) opts.mc = mc_options(cfg, o.workers);
  const auto rows = build_table(spec, cfg.u_list, opts);

  auto emit = [&](std::ostream& os, OutputFormat f) {
    if (f == OutputFormat::csv)
      write_csv(os, rows);
    else
      write_markdown(os, rows);
  };
  if (cfg.output_path.empty()) {
    emit(out, cfg.format);
    return kOk;
  }
  std::ofstream file(cfg.output_path);
  if (!file) throw ConfigError("cannot write '" + cfg.output_path + "'");
  emit(file, cfg.format);
  if (cfg.format == OutputFormat::csv) {
    std::ofstream md(cfg.output_path + ".md");
    write_markdown(md, rows);
  }
  out << "wrote " << rows.size() << " rows to " << cfg.output_path << "\n";
  return kOk;
}

int cmd_approx(const Overrides& o, std::ostream& out) {
  const RunConfig cfg = resolve(o);
  require_u_list(cfg);
  const ModelSpec spec = ModelSpec::create(cfg.model);
  std::vector<Variant> variants{cfg.variant};
  if (o.variant && *o.variant == "both") variants = {Variant::density_form, Variant::limit_form};
  for (double u : cfg.u_list) {
    for (Variant v : variants) {
      const TailApproximation a = approximate(spec, u, v);
      out << "u = " << format_full(u) << "\n";
      out << "variant = " << to_string(v) << "\n";
      print_value(out, "first_order", a.first_order, a.log_first_order);
      for (std::size_t j = 0; j < spec.dim(); ++j)
        for (std::size_t i = 0; i < spec.dim(); ++i)
          if (i != j) {
            std::ostringstream name;
            name << "pair_term[j=" << spec.original_index(j) + 1 << ",i=" << spec.original_index(i) + 1
                 << "]";
            print_value(out, name.str(), a.pair_terms(j, i), a.log_pair_terms(j, i));
          }
      print_value(out, "correction", a.correction, a.log_correction);
      print_value(out, "second_order", a.second_order, a.log_second_order);
      out << "\n";
    }
  }
  return kOk;
}

int cmd_mc(const Overrides& o, std::ostream& out) {
  const RunConfig cfg = resolve(o);
  require_u_list(cfg);
  const ModelSpec spec = ModelSpec::create(cfg.model);
  const MCOptions opts = mc_options(cfg, o.workers);
  const auto estimates = mc_table(spec, cfg.u_list, opts);
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    const MCEstimate& e = estimates[k];
    out << "u = " << format_full(cfg.u_list[k]) << "\n";
    out << "estimator = " << to_string(e.estimator) << "\n";
    out << "n = " << e.n << "\n";
    out << "seed = " << e.seed << "\n";
    out << "value = " << format_full(e.value) << "\n";
    out << "stderr = " << format_full(e.std_error) << "\n";
    out << "rel_stderr = " << format_full(e.rel_error()) << "\n";
    out << "wall_time_s = " << std::fixed << std::setprecision(3) << e.elapsed << "\n\n";
    out.unsetf(std::ios::floatfield);
  }
  return kOk;
}

int cmd_verify(const Overrides& o, std::ostream& out) {
  const RunConfig cfg = resolve(o);
  const ModelSpec spec = ModelSpec::create(cfg.model);
  const ScalingBundle& bundle = spec.scaling();
  auto status = [](bool ok) { return ok ? "ok  " : "warn"; };
  out << std::setprecision(6);

  {
    const std::vector<double> rs{3.0, 10.0, 30.0};
    const std::vector<double> xs{-2.0, -1.0, 1.0, 2.0};
    const auto rows = probe_mda_limit(spec.radial(), rs, xs);
    out << "[radial MDA] tail(r + x b(r)) / tail(r) vs exp(-x)\n";
    std::vector<double> worst(rs.size(), 0.0);
    for (std::size_t k = 0; k < rows.size(); ++k) worst[k / xs.size()] = std::max(worst[k / xs.size()], rows[k].rel_error());
    for (std::size_t k = 0; k < rs.size(); ++k) out << "  r = " << rs[k] << "  max rel error " << worst[k] << "\n";
    out << "  " << status(worst.back() < worst.front()) << " error shrinks with r\n";
  }
  {
    const std::vector<double> us{1e4, 1e8};
    const std::vector<double> xs{-2.0, -1.0, 0.0, 1.0, 2.0};
    const auto rows = probe_margin_mda(bundle, 0, us, xs);
    out << "[margin MDA] P(X_1 > u + x e*(u)) / P(X_1 > u) vs exp(-x)\n";
    double w4 = 0.0, w8 = 0.0;
    for (const auto& r : rows) (r.u == 1e4 ? w4 : w8) = std::max(r.u == 1e4 ? w4 : w8, r.rel_error());
    out << "  u = 1e4  max rel error " << w4 << "\n  u = 1e8  max rel error " << w8 << "\n";
    out << "  " << status(w8 < w4) << " error shrinks with u\n";
  }
  if (spec.dim() >= 2) {
    std::vector<double> us = cfg.u_list;
    if (us.empty()) us = {10.0, 100.0, 1000.0};
    out << "[condition rho] sigma_ij + c sqrt((1 - sigma_ij^2)/log u) - (beta_j/beta_i) log(eps e_i*(u))/log u"
        << "  (c = 1, eps = 1; negative holds)\n";
    for (double u : us) {
      if (!(u > 1.0)) continue;
      double worst = -1e300;
      for (const auto& m : probe_condition_rho(bundle, spec.sigma(), u, 1.0, 1.0))
        if (spec.beta(m.j) == spec.beta(0)) worst = std::max(worst, m.margin());
      out << "  u = " << u << "  max margin " << worst << "  " << (worst < 0.0 ? "holds" : "fails") << "\n";
    }
  }
  {
    std::vector<double> us;
    for (double e = 3.0; e <= 9.0; e += 0.5) us.push_back(std::pow(10.0, e));
    const double w = probe_oregular(spec.radial(), us);
    out << "[O-regular] max |e(1.01u)/e(u) - 1| on [1e3, 1e9] = " << w << "\n";
    out << "  " << status(w <= 0.02) << " bounded by 0.02\n";
  }
  {
    const int d = static_cast<int>(std::max<std::size_t>(2, spec.dim()));
    out << "[angular lemma] exact integral / asymptotic, d = " << d << "\n";
    double prev = 0.0;
    bool shrinking = true;
    for (double u : {1e4, 1e8}) {
      const AngularCheck c = verify_angular_lemma(spec.radial(), spec.lambda(0), spec.beta(0), spec.gamma(), d, u);
      const double dev = std::abs(c.ratio - 1.0);
      if (u == 1e8) shrinking = dev < prev;
      prev = dev;
      out << "  u = " << u << "  ratio " << c.ratio << "\n";
    }
    out << "  " << status(shrinking) << " ratio approaches 1\n";
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Second-order tail asymptotics of aggregated log-elliptical risk"};
  app.require_subcommand(1);
  Overrides o;

  auto* table = app.add_subcommand("table", "asymptotic/MC/diagnostic table for a list of thresholds");
  add_common(table, o);
  add_mc(table, o);
  table->add_option("--variant", o.variant, "limit | density");
  table->add_option("--epsilon-c", o.epsilon_c, "constant c of the epsilon measure");
  table->add_option("--out", o.out, "output path (stdout if omitted)");
  table->add_option("--format", o.format, "csv | markdown");
  table->add_flag("--no-mc", o.no_mc, "skip the Monte Carlo column");

  auto* approx = app.add_subcommand("approx", "first- and second-order approximation at u");
  add_common(approx, o);
  approx->add_option("--variant", o.variant, "limit | density | both");

  auto* mc = app.add_subcommand("mc", "Monte Carlo estimate of P(S > u)");
  add_common(mc, o);
  add_mc(mc, o);

  auto* verify = app.add_subcommand("verify", "numeric probes of the asymptotic conditions");
  add_common(verify, o);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (*table) return cmd_table(o, out);
    if (*approx) return cmd_approx(o, out);
    if (*mc) return cmd_mc(o, out);
    if (*verify) return cmd_verify(o, out);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericError;
  }
  return kConfigError;
}

}  // namespace tailsum::cli
