#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cvsel/criterion.hpp"
#include "cvsel/model_space.hpp"
#include "cvsel/oracle.hpp"
#include "cvsel/schemes.hpp"
#include "cvsel/types.hpp"

namespace cvsel {

// Finite-n values of the regularity conditions behind the optimality and
// consistency results. Asymptotic statements are reported as numbers along an
// n-grid, never as pass/fail; trends are the user's call.

// sum over models of 1 / (n * risk)^m; models with zero risk are excluded and
// counted in *excluded if given.
double cond_sum_inverse_risk(const std::vector<ModelAlpha>& models, const Matrix& x,
                             const TruthSpec& truth, int m, int* excluded = nullptr);

// (max candidate dim) * lambda_n / min over models of n * risk. Undefined
// (nullopt) when the minimum risk is zero.
std::optional<double> cond_pn_lambda_ratio(const std::vector<ModelAlpha>& models,
                                           const Matrix& x, const TruthSpec& truth,
                                           int train_size);

enum class AInNormalizer { risk, dim_lambda };

struct AInReport {
  std::vector<double> mean_ain;      // (1/r) sum_i a_in, aligned with models
  double max_normalized = 0.0;       // max over models of mean_ain / normalizer
  double max_abs_raw_over_n = 0.0;   // max over models of |mean_ain| / n
  int excluded = 0;                  // models with zero normalizer, skipped
};

// Design-alignment diagnostics. normalizer == risk needs truth (n * risk);
// normalizer == dim_lambda uses dim(alpha) * lambda_n.
AInReport cond_a_in(const std::vector<ModelAlpha>& models, const Matrix& x,
                    const TrainingScheme& scheme, AInNormalizer normalizer,
                    const TruthSpec* truth = nullptr);

// Spread of mean a_in over a correct-model set relative to the dimension gap:
// max over alpha != alpha_c of
//   [mean_ain(alpha) - mean_ain(alpha_c)] / [(dim(alpha) - dim(alpha_c)) * lambda_n].
// Models with dim equal to alpha_c's are skipped (zero gap); nullopt if none remain.
std::optional<double> cond_a_in_gap_ratio(const std::vector<ModelAlpha>& correct_models,
                                          const ModelAlpha& alpha_c, const Matrix& x,
                                          const TrainingScheme& scheme);

// min over models of the squared bias Delta_n(alpha). Zero signals the
// model-true regime.
double cond_identifiability(const std::vector<ModelAlpha>& models, const Matrix& x,
                            const TruthSpec& truth);

struct MiscConditions {
  double train_frac_log_n = 0.0;   // (train/n) log n
  double dim_lambda_over_n = 0.0;  // max_dim * lambda_n / n
  double mean_sq_mu = 0.0;         // ||mu||^2 / n
  int n_correct = 0;
  // Over the correct set: sum of 1/dim^m, and sum over alpha != alpha_c of
  // 1 / (lambda^(2m) * (dim(alpha) - dim(alpha_c))^m). Absent when no model
  // is correct; the second is 0 for a singleton correct set.
  std::optional<double> sum_inv_dim;
  std::optional<double> sum_inv_lambda_dim_gap;
  int zero_gap_skipped = 0;
};

MiscConditions cond_misc(const Matrix& x, const ModelSpace& space, const TruthSpec& truth,
                         int train_size, int m,
                         std::optional<double> correct_tol = std::nullopt);

struct UniformRatios {
  // max over models of |e'P(alpha)e - sigma2 dim| / (n risk)
  double max_quad_gap = 0.0;
  // max over models of |e'(I-P(alpha)) mu| / (n risk)
  double max_cross_ratio = 0.0;
  // max over models of |loss/risk - 1|
  double max_loss_risk_gap = 0.0;
  // max over models (with positive bias) of the training-average bias ratio
  //   (1/r) sum_i mu_i'(I-P_i(alpha)) mu_i / mu'(I-P(alpha)) mu,
  // bounded above by (n-k)/n for every balanced scheme.
  std::optional<double> max_train_bias_ratio;
  double train_bias_bound = 0.0;
  int excluded_zero_risk = 0;
  int excluded_zero_bias = 0;
};

UniformRatios empirical_uniform_ratios(const CriterionEngine& engine,
                                       const TruthSpec& truth, const Vector& e);
UniformRatios empirical_uniform_ratios(const ModelSpace& space, const Matrix& x,
                                       const TruthSpec& truth,
                                       const TrainingScheme& scheme, const Vector& e);

struct SplitIdentityGaps {
  // Relative gap of splitting mu'(I-P)mu into training and validation rows.
  double split_rel = 0.0;
  // Relative gap of mu'(I-P)mu - mu_1'(I-P_1)mu_1 against the validation-block
  // quadratic form through (I-P_c)^{-1}.
  double complement_rel = 0.0;
  // Max-entry relative gap of (I-P_c)^{-1} = I + X_v (X_1'X_1)^{-1} X_v'.
  double inverse_rel = 0.0;
  // Quadratic-form slack (I-P_c)^{-1} weighted minus unweighted; >= 0 up to fp.
  double psd_slack = 0.0;
};

// Dense small-n verification of the projection split identities for one
// training sample. Used by tests and the acceptance suite.
SplitIdentityGaps split_identity_gaps(const Matrix& x, const ModelAlpha& alpha,
                                         const Vector& mu, const IndexList& training_rows);

// Aggregated, serializable diagnostics for one (design, space, scheme) triple.
struct ConditionReport {
  int m = 2;
  int n = 0;
  int train_size = 0;
  int max_dim = 0;
  double lambda = 0.0;

  // design-only
  std::vector<double> mean_ain;  // aligned with the space's models
  double max_abs_mean_ain_over_n = 0.0;
  double train_frac_log_n = 0.0;
  double dim_lambda_over_n = 0.0;

  // truth-dependent (absent without a TruthSpec)
  bool has_truth = false;
  int n_correct = 0;
  std::optional<ModelAlpha> alpha_c;  // most parsimonious correct model
  std::optional<double> sum_inv_risk_all;
  std::optional<double> sum_inv_risk_incorrect;
  std::optional<double> dim_lambda_over_min_risk_all;
  std::optional<double> dim_lambda_over_min_risk_incorrect;
  std::optional<double> max_mean_ain_over_risk;
  std::optional<double> max_mean_ain_over_dim_lambda_correct;
  std::optional<double> ain_gap_ratio_correct;
  std::optional<double> min_bias;
  std::optional<double> mean_sq_mu;
  std::optional<double> sum_inv_dim_correct;
  std::optional<double> sum_inv_lambda_dim_gap_correct;

  std::vector<std::string> annotations;
};

ConditionReport build_condition_report(const CriterionEngine& engine, int m,
                                       const TruthSpec* truth = nullptr,
                                       std::optional<double> correct_tol = std::nullopt);

}  // namespace cvsel
