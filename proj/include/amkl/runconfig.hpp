#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "amkl/kl_diagnostics.hpp"
#include "amkl/network.hpp"
#include "amkl/objectives.hpp"
#include "amkl/solvers.hpp"

namespace amkl {

enum class DataSource { synthetic, csv };

/// A fully resolved training run. Every field has a default; a minimal config
/// file names only form, solver and dims.
struct RunConfig {
  SplitForm form = SplitForm::two_split_fnn;
  SolverKind solver = SolverKind::bcd2;
  NetworkSpec spec;
  Hyperparams hyper;
  SolverConfig solver_config;
  DataSource source = DataSource::synthetic;
  int n = 32;
  double noise = 0.0;
  std::string csv_path;
  std::uint64_t seed = 1;
  std::string out_dir = "run";
  std::string canonical;  // canonical JSON echo, input to the digest
};

/// Parses and validates a config document; throws ConfigError naming the
/// offending field.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

struct DiagnoseOptions {
  int j = 1;
  std::optional<double> fstar;  // default: min f over the trace (biased proxy)
  std::optional<double> theta;  // enables the envelope check
  std::optional<double> alpha;  // enables the A2 certificate
  std::string out;              // default: diagnosis.json next to the trace
};

// Command implementations behind the CLI; diagnostics go to `err`, payload to
// `out`. Exit codes: 0 ok, 1 usage/config, 2 divergence, 3 a failed
// decrease condition.
int cmd_train(const std::string& config_path, const std::string& out_override,
              std::ostream& out, std::ostream& err);
int cmd_toy(double p, const std::string& iterator, double step, double bump, double x0,
            int steps, const std::string& out_dir, std::ostream& out, std::ostream& err);
int cmd_diagnose(const std::string& trace_path, const DiagnoseOptions& options,
                 std::ostream& out, std::ostream& err);
int cmd_report(const std::vector<std::string>& run_dirs, const std::string& csv_out,
               std::ostream& out, std::ostream& err);

}  // namespace amkl
