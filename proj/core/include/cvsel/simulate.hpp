#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cvsel/diagnostics.hpp"
#include "cvsel/model_space.hpp"
#include "cvsel/oracle.hpp"
#include "cvsel/rng.hpp"
#include "cvsel/schemes.hpp"
#include "cvsel/types.hpp"

namespace cvsel {

struct DesignSpec {
  std::string id = "equispaced-polynomial";  // | iid-gaussian-columns | orthogonal
  int p = 5;
};

struct TruthGenSpec {
  std::string id = "smooth-nonlinear";  // | linear-in-subset
  // linear-in-subset
  ModelAlpha alpha_star;
  std::vector<double> beta_star;
  // smooth-nonlinear, evaluated on t_i = i/n
  std::string g = "exp";  // mu_i = exp(scale * t_i)  |  "sin": mu_i = scale * sin(freq * t_i)
  double scale = 1.0;
  double freq = 1.0;
};

struct ErrorSpec {
  std::string dist = "normal";  // | scaled-uniform | shifted-exponential
  double sigma = 1.0;
};

struct SchemeSpec {
  std::string kind = "disjoint";  // | rotation
  BlockLayout layout = BlockLayout::strided;
  int rotation_r = 0;  // 0: smallest balanced r = n / gcd(n, train_size)
};

struct TrainSizeRule {
  std::string kind = "power";  // | fraction | fixed
  double c = 1.0;              // power: train = ceil(c * n^gamma)
  double gamma = 0.6;
  double fraction = 0.5;       // fraction: train = ceil(fraction * n)
  int fixed = 0;
  // Disjoint schemes need train | n; snap to the nearest divisor (ties down).
  bool round_to_divisor = true;
};

struct ExperimentConfig {
  std::vector<int> n_grid;
  int replications = 1;
  DesignSpec design;
  TruthGenSpec truth;
  ErrorSpec errors;
  SchemeSpec scheme;
  TrainSizeRule train_rule;
  SpaceSpec space;  // ambient_p is bound to design.p at run time
  Variant variant = Variant::unknown_sigma;
  int diagnostics_m = 2;
  std::uint64_t seed = 1;
};

struct RepResult {
  int n = 0;
  int rep = 0;  // 1-based
  bool failed = false;
  std::string error;
  ModelAlpha selected;
  ModelAlpha oracle;
  double loss_selected = 0.0;
  double loss_oracle = 0.0;
  double ratio = 1.0;
  std::optional<bool> correct_selected;  // present when a correct model exists
  bool train_logrss_positive = false;    // sum_i log S_i > 0 at the largest model
  UniformRatios uniform;
};

struct GridResult {
  int n = 0;
  int train_size = 0;
  int r = 0;
  int coverage = 0;
  double lambda = 0.0;
  ConditionReport conditions;
  int failures = 0;
  double ratio_q10 = 0.0;
  double ratio_q50 = 0.0;
  double ratio_q90 = 0.0;
  std::optional<double> correct_frequency;
  double train_logrss_positive_freq = 0.0;
  // max over replications of the empirical uniform-convergence ratios
  double max_quad_gap = 0.0;
  double max_cross_ratio = 0.0;
  double max_loss_risk_gap = 0.0;
  std::optional<double> max_train_bias_ratio;
  double train_bias_bound = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<GridResult> per_n;
  std::vector<RepResult> reps;  // ordered by (n, rep)
  std::vector<std::string> notes;
};

Matrix gen_design(const std::string& id, int p, int n, std::uint64_t design_seed);
Matrix gen_design(const DesignSpec& spec, int n, std::uint64_t master_seed);

Vector gen_truth(const TruthGenSpec& spec, const Matrix& x);

Vector gen_errors(const std::string& dist, double sigma, int n, Rng& rng);

// The realized training size for one n under the rule; throws ConfigError when
// the result cannot satisfy 1 <= train < n and train >= min_train.
int resolve_train_size(const TrainSizeRule& rule, int n, const std::string& scheme_kind,
                       int min_train);

TrainingScheme build_scheme(const SchemeSpec& spec, int n, int train_size);

// Interpolating quantile (type 7) of a sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double q);

// Runs the full grid. threads == 0 reads CVSELECT_THREADS, defaulting to all
// hardware threads. Output is a pure function of config regardless of threads.
ExperimentReport run_experiment(const ExperimentConfig& config, int threads = 0);

}  // namespace cvsel
