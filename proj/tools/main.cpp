#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "amkl/runconfig.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Alternating-minimization network training and convergence-rate diagnostics"};
  app.require_subcommand(1);

  // train
  std::string config_path;
  std::string train_out;
  auto* train = app.add_subcommand("train", "run a solver from a JSON config");
  train->add_option("--config", config_path, "config file")->required();
  train->add_option("--out", train_out, "output directory (overrides the config)");

  // toy
  double toy_p = 2.0;
  std::string toy_iter = "gradient_descent";
  double toy_step = 0.25;
  double toy_bump = 0.05;
  double toy_x0 = 1.0;
  int toy_steps = 200;
  std::string toy_out = "toy_run";
  auto* toy = app.add_subcommand("toy", "generate a |x|^p trace with known exponent");
  toy->add_option("--p", toy_p, "power of |x|^p");
  toy->add_option("--iter", toy_iter, "gradient_descent | proximal_point | two_phase");
  toy->add_option("--t", toy_step, "step size");
  toy->add_option("--bump", toy_bump, "two_phase growth factor");
  toy->add_option("--x0", toy_x0, "starting point");
  toy->add_option("--steps", toy_steps, "iteration count");
  toy->add_option("--out", toy_out, "output directory");

  // diagnose
  std::string trace_path;
  amkl::DiagnoseOptions diag;
  double fstar_flag = 0.0;
  double theta_flag = 0.0;
  double alpha_flag = 0.0;
  auto* diagnose = app.add_subcommand("diagnose", "certify decrease conditions and fit rates");
  diagnose->add_option("--trace", trace_path, "trace.jsonl to analyze")->required();
  diagnose->add_option("--j", diag.j, "decrease step count");
  auto* fstar_opt = diagnose->add_option("--fstar", fstar_flag, "limit objective value");
  auto* theta_opt = diagnose->add_option("--theta", theta_flag, "exponent for the envelope check");
  auto* alpha_opt = diagnose->add_option("--alpha", alpha_flag, "exponent for the A2 certificate");
  diagnose->add_option("--out", diag.out, "diagnosis file (default: next to the trace)");

  // report
  std::vector<std::string> run_dirs;
  std::string report_out = "report.csv";
  auto* report = app.add_subcommand("report", "tabulate runs into CSV and a summary table");
  report->add_option("dirs", run_dirs, "run directories")->required();
  report->add_option("--out", report_out, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage problems map to exit 1
  }

  if (train->parsed()) return amkl::cmd_train(config_path, train_out, std::cout, std::cerr);
  if (toy->parsed()) {
    return amkl::cmd_toy(toy_p, toy_iter, toy_step, toy_bump, toy_x0, toy_steps, toy_out,
                         std::cout, std::cerr);
  }
  if (diagnose->parsed()) {
    if (fstar_opt->count() > 0) diag.fstar = fstar_flag;
    if (theta_opt->count() > 0) diag.theta = theta_flag;
    if (alpha_opt->count() > 0) diag.alpha = alpha_flag;
    return amkl::cmd_diagnose(trace_path, diag, std::cout, std::cerr);
  }
  if (report->parsed()) return amkl::cmd_report(run_dirs, report_out, std::cout, std::cerr);
  return 1;
}
