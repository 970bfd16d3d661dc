#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "cvsel/simulate.hpp"

namespace cvsel {

// Command implementations behind the CLI binary, kept in the library so tests
// can drive them directly. Each returns the process exit code: 0 success,
// 2 invalid input/config, 3 computational failure.

struct SelectOptions {
  std::string data_path;
  std::string response;
  std::string models = "nested";   // nested | all:<max> | file:<path>
  std::string scheme = "disjoint"; // disjoint | disjoint:strided | rotation[:<r>]
  int train_size = 0;
  std::optional<double> sigma2;    // absent: unknown-variance variant
  std::uint64_t seed = 0;          // accepted for interface uniformity; unused
  std::string out_path;
};

struct DiagnoseOptions {
  std::string data_path;
  std::string response;
  std::string models = "nested";
  std::string scheme = "disjoint";
  int train_size = 0;
  std::optional<double> sigma2;
  std::optional<std::string> truth_mu;  // comma-separated values
  int m = 2;
  std::string out_path;
};

struct SimulateOptions {
  std::string config_path;
  std::string out_prefix;
  int threads = 0;  // 0: CVSELECT_THREADS, then hardware
};

int cmd_select(const SelectOptions& opts, std::ostream& out, std::ostream& err);
int cmd_diagnose(const DiagnoseOptions& opts, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err);

// Stable serializations shared by cmd_simulate and the test suites; output is
// a pure function of the report.
std::string experiment_report_json(const ExperimentReport& report);
std::string experiment_reps_csv(const ExperimentReport& report);
std::string experiment_summary_csv(const ExperimentReport& report);

ExperimentConfig parse_experiment_config(const std::string& json_text);

std::string tool_version();

}  // namespace cvsel
