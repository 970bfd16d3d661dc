#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cvsel/commands.hpp"

// Subcommands:
//   select    pick the model with the best cross-validated predictive score
//   diagnose  report the finite-n regularity quantities for a design/scheme
//   simulate  run a seeded Monte Carlo experiment from a JSON config
// Exit codes: 0 success, 2 invalid input or config, 3 computational failure.

int main(int argc, char** argv) {
  CLI::App app{"Cross-validated model selection for normal linear models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cvsel::tool_version());

  cvsel::SelectOptions sel;
  CLI::App* select = app.add_subcommand("select", "Select a model from CSV data");
  select->add_option("--data", sel.data_path, "CSV file with a header row")->required();
  select->add_option("--response", sel.response, "Response column name")->required();
  select->add_option("--models", sel.models, "nested | all[:<max>] | file:<path>");
  select->add_option("--scheme", sel.scheme,
                     "disjoint[:consecutive|:strided] | rotation[:<r>]");
  select->add_option("--train-size", sel.train_size, "Training sample size")->required();
  double sel_sigma2 = 0.0;
  CLI::Option* sel_s2 =
      select->add_option("--sigma2", sel_sigma2, "Known noise variance (omit: unknown)");
  select->add_option("--seed", sel.seed, "Accepted for interface uniformity; unused");
  select->add_option("--out", sel.out_path, "Write the JSON report here");

  cvsel::DiagnoseOptions diag;
  CLI::App* diagnose =
      app.add_subcommand("diagnose", "Report design/scheme regularity quantities");
  diagnose->add_option("--data", diag.data_path, "CSV file with a header row")->required();
  diagnose->add_option("--response", diag.response, "Response column name")->required();
  diagnose->add_option("--models", diag.models, "nested | all[:<max>] | file:<path>");
  diagnose->add_option("--scheme", diag.scheme,
                       "disjoint[:consecutive|:strided] | rotation[:<r>]");
  diagnose->add_option("--train-size", diag.train_size, "Training sample size")->required();
  double diag_sigma2 = 0.0;
  CLI::Option* diag_s2 = diagnose->add_option("--sigma2", diag_sigma2,
                                              "Noise variance for risk-scaled quantities");
  std::string diag_mu;
  CLI::Option* diag_mu_opt = diagnose->add_option(
      "--truth-mu", diag_mu, "True mean vector, comma-separated, length n");
  diagnose->add_option("--m", diag.m, "Moment index for the summability diagnostics");
  diagnose->add_option("--out", diag.out_path, "Write the JSON report here");

  cvsel::SimulateOptions sim;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Run a Monte Carlo experiment from a JSON config");
  simulate->add_option("--config", sim.config_path, "Experiment config JSON")->required();
  simulate->add_option("--out", sim.out_prefix, "Output path prefix")->required();
  simulate->add_option("--threads", sim.threads,
                       "Worker threads (0: CVSELECT_THREADS, then all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (select->parsed()) {
    if (sel_s2->count() > 0) sel.sigma2 = sel_sigma2;
    return cvsel::cmd_select(sel, std::cout, std::cerr);
  }
  if (diagnose->parsed()) {
    if (diag_s2->count() > 0) diag.sigma2 = diag_sigma2;
    if (diag_mu_opt->count() > 0) diag.truth_mu = diag_mu;
    return cvsel::cmd_diagnose(diag, std::cout, std::cerr);
  }
  if (simulate->parsed()) {
    return cvsel::cmd_simulate(sim, std::cout, std::cerr);
  }
  return 2;
}
