#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tailsum/asymptotics.hpp"
#include "tailsum/diagnostics.hpp"
#include "tailsum/model.hpp"
#include "tailsum/montecarlo.hpp"

namespace tailsum {

enum class OutputFormat { csv, markdown };

std::string to_string(OutputFormat f);
OutputFormat output_format_from_string(const std::string& name);

struct McConfig {
  Estimator estimator = Estimator::conditional_radial;
  std::uint64_t n = 1'000'000;
  std::uint64_t seed = 20130607;
  bool operator==(const McConfig&) const = default;
};

/// Everything a CLI run needs. JSON on disk:
///
///   { "d": 2, "lambda": [1, 1], "beta": [1, 1], "gamma": 1,
///     "rho": 0.9,                      // or "sigma": [[1, 0.9], [0.9, 1]]
///     "radial": {"kind": "chi", "params": [2]},
///     "u_list": [10, 30],
///     "mc": {"estimator": "radial", "n": 1000000, "seed": 1},
///     "variant": "density", "epsilon_c": 1,
///     "output": {"format": "csv", "path": ""} }
///
/// Only "d" (or "lambda"/"sigma" to infer it) is required; defaults are
/// gamma = 1, unit lambda and beta, chi(d) radius, density variant, c = 1.
struct RunConfig {
  ModelParams model;
  std::vector<double> u_list;
  McConfig mc;
  Variant variant = Variant::density_form;
  double epsilon_c = 1.0;
  OutputFormat format = OutputFormat::csv;
  std::string output_path;

  bool operator==(const RunConfig&) const = default;
};

/// Throws ConfigError on malformed input. Model invariants are not checked
/// here (see validate()).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

// ---------------------------------------------------------------------------
// Table output
// ---------------------------------------------------------------------------

/// Column names, in output order.
const std::vector<std::string>& table_columns();

/// 17 significant digits, '.' decimal point, scientific when 0 < |x| < 1e-3.
std::string format_full(double x);
/// 3 significant digits, the way the printed tables show values.
std::string format_3sig(double x);

void write_csv(std::ostream& os, const std::vector<DiagnosticsRow>& rows);
void write_markdown(std::ostream& os, const std::vector<DiagnosticsRow>& rows,
                    const std::string& title = {});
/// Reads back what write_csv produced. Throws ConfigError on a bad header.
std::vector<DiagnosticsRow> read_csv(std::istream& is);

}  // namespace tailsum
