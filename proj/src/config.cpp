#include "tailsum/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include "json.hpp"
#include <ostream>
#include <sstream>

#include "tailsum/errors.hpp"

namespace tailsum {

using nlohmann::json;

std::string to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "markdown"; }

OutputFormat output_format_from_string(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "markdown" || name == "md") return OutputFormat::markdown;
  throw ConfigError("unknown output format '" + name + "' (expected csv or markdown)");
}

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

bool is_equicorrelated(const CorrelationMatrix& m, double* rho) {
  const std::size_t d = m.dim();
  if (d < 2) {
    *rho = 0.0;
    return true;
  }
  const double r = m(0, 1);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k)
      if (i == k ? m(i, k) != 1.0 : m(i, k) != r) return false;
  *rho = r;
  return true;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  RunConfig cfg;
  long long d = -1;
  if (j.contains("d")) {
    d = get_or<long long>(j, "d", -1);
  } else if (j.contains("lambda")) {
    d = static_cast<long long>(j["lambda"].size());
  } else if (j.contains("sigma")) {
    d = static_cast<long long>(j["sigma"].size());
  } else {
    throw ConfigError("config must give the dimension 'd'");
  }
  if (d < 0) throw ConfigError("dimension d must be non-negative");
  const auto dim = static_cast<std::size_t>(d);

  auto& m = cfg.model;
  m.lambda = get_or(j, "lambda", std::vector<double>(dim, 1.0));
  m.beta = get_or(j, "beta", std::vector<double>(dim, 1.0));
  m.gamma = get_or(j, "gamma", 1.0);
  if (j.contains("sigma") && j.contains("rho")) throw ConfigError("give either 'rho' or 'sigma', not both");
  if (j.contains("sigma")) {
    const auto rows = get_or(j, "sigma", std::vector<std::vector<double>>{});
    if (rows.size() != dim) throw ConfigError("'sigma' must have d rows");
    try {
      m.sigma = CorrelationMatrix::from_rows(rows);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("'sigma': ") + e.what());
    }
  } else {
    m.sigma = CorrelationMatrix::equicorrelated(dim, get_or(j, "rho", 0.0));
  }

  try {
    if (j.contains("radial")) {
      const json& r = j["radial"];
      if (!r.is_object()) throw ConfigError("'radial' must be an object");
      const RadialKind kind = radial_kind_from_string(get_or<std::string>(r, "kind", "chi"));
      auto params = get_or(r, "params", std::vector<double>{});
      if (kind == RadialKind::chi && params.empty()) params.push_back(static_cast<double>(dim));
      m.radial = make_radial(kind, params);
    } else {
      m.radial = RadialLaw::chi(std::max<int>(1, static_cast<int>(dim)));
    }
  } catch (const InvalidParams& e) {
    throw ConfigError(std::string("'radial': ") + e.what());
  }

  cfg.u_list = get_or(j, "u_list", std::vector<double>{});
  if (j.contains("mc")) {
    const json& mc = j["mc"];
    if (!mc.is_object()) throw ConfigError("'mc' must be an object");
    try {
      cfg.mc.estimator = estimator_from_string(get_or<std::string>(mc, "estimator", "radial"));
    } catch (const InvalidParams& e) {
      throw ConfigError(e.what());
    }
    cfg.mc.n = get_or<std::uint64_t>(mc, "n", cfg.mc.n);
    cfg.mc.seed = get_or<std::uint64_t>(mc, "seed", cfg.mc.seed);
  }
  try {
    cfg.variant = variant_from_string(get_or<std::string>(j, "variant", "density"));
  } catch (const InvalidParams& e) {
    throw ConfigError(e.what());
  }
  cfg.epsilon_c = get_or(j, "epsilon_c", 1.0);
  if (j.contains("output")) {
    const json& out = j["output"];
    cfg.format = output_format_from_string(get_or<std::string>(out, "format", "csv"));
    cfg.output_path = get_or<std::string>(out, "path", "");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  json j;
  const auto& m = c.model;
  j["d"] = m.dim();
  j["lambda"] = m.lambda;
  j["beta"] = m.beta;
  j["gamma"] = m.gamma;
  double rho = 0.0;
  if (is_equicorrelated(m.sigma, &rho)) {
    j["rho"] = rho;
  } else {
    std::vector<std::vector<double>> rows(m.dim(), std::vector<double>(m.dim()));
    for (std::size_t i = 0; i < m.dim(); ++i)
      for (std::size_t k = 0; k < m.dim(); ++k) rows[i][k] = m.sigma(i, k);
    j["sigma"] = rows;
  }
  j["radial"] = {{"kind", to_string(m.radial.kind())}, {"params", m.radial.params()}};
  j["u_list"] = c.u_list;
  j["mc"] = {{"estimator", to_string(c.mc.estimator)}, {"n", c.mc.n}, {"seed", c.mc.seed}};
  j["variant"] = to_string(c.variant);
  j["epsilon_c"] = c.epsilon_c;
  j["output"] = {{"format", to_string(c.format)}, {"path", c.output_path}};
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& table_columns() {
  static const std::vector<std::string> cols = {"u",      "asympt1", "asympt2",     "mc",
                                                "mc_stderr", "ratio1", "ratio2",  "epsilon",
                                                "exp_epsilon", "rho_hat"};
  return cols;
}

std::string format_full(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto fmt = (x != 0.0 && std::abs(x) < 1e-3) ? std::chars_format::scientific
                                                     : std::chars_format::general;
  const int precision = fmt == std::chars_format::scientific ? 16 : 17;
  const auto res = std::to_chars(buf, buf + sizeof buf, x, fmt, precision);
  return std::string(buf, res.ptr);
}

std::string format_3sig(double x) {
  if (std::isnan(x)) return "-";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 3);
  return std::string(buf, res.ptr);
}

namespace {

// Thresholds are exact inputs; print them in their shortest round-trip form.
std::string format_threshold(double u) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, u);
  return std::string(buf, res.ptr);
}

std::vector<double> row_values(const DiagnosticsRow& r) {
  return {r.u,      r.asympt1, r.asympt2,  r.mc,          r.mc_stderr,
          r.ratio1, r.ratio2,  r.epsilon, r.exp_epsilon, r.rho_hat};
}

double parse_number(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("bad number '" + s + "' in CSV");
  return v;
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<DiagnosticsRow>& rows) {
  const auto& cols = table_columns();
  for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
  os << '\n';
  for (const auto& r : rows) {
    const auto v = row_values(r);
    for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << format_full(v[k]);
    os << '\n';
  }
}

void write_markdown(std::ostream& os, const std::vector<DiagnosticsRow>& rows,
                    const std::string& title) {
  if (!title.empty()) os << "### " << title << "\n\n";
  os << "| u | Asympt 1 | Asympt 2 | MC | Ratio 1 | Ratio 2 | eps | e^eps | rho_hat |\n";
  os << "|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    os << "| " << format_threshold(r.u) << " | " << format_3sig(r.asympt1) << " | "
       << format_3sig(r.asympt2) << " | " << format_3sig(r.mc) << " | " << format_3sig(r.ratio1)
       << " | " << format_3sig(r.ratio2) << " | " << format_3sig(r.epsilon) << " | "
       << format_3sig(r.exp_epsilon) << " | " << format_3sig(r.rho_hat) << " |\n";
  }
}

std::vector<DiagnosticsRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty CSV");
  std::string expected;
  for (const auto& c : table_columns()) expected += (expected.empty() ? "" : ",") + c;
  if (line != expected) throw ConfigError("unexpected CSV header: " + line);
  std::vector<DiagnosticsRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(parse_number(cell));
    if (v.size() != table_columns().size()) throw ConfigError("CSV row has the wrong column count");
    rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]});
  }
  return rows;
}

}  // namespace tailsum
