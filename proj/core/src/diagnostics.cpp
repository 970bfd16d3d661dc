#include "cvsel/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cvsel/errors.hpp"
#include "cvsel/linalg.hpp"

namespace cvsel {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_m(int m) {
  if (m < 1) throw InvalidInput("moment parameter m must be >= 1");
}

double n_risk(const Matrix& x, const ModelAlpha& alpha, const TruthSpec& truth) {
  return static_cast<double>(x.rows()) * risk(x, alpha, truth);
}

double ipow(double base, int exp) {
  double out = 1.0;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

int max_model_dim(const std::vector<ModelAlpha>& models) {
  int out = 0;
  for (const ModelAlpha& m : models) out = std::max(out, m.dim());
  return out;
}

// Mean over the scheme's samples of a_in for one model, sharing the full-data
// log-determinant across samples.
double mean_a_in_fresh(const Matrix& x, const ModelAlpha& alpha,
                       const TrainingScheme& scheme) {
  const double ld = GramFactor(submatrix(x, alpha)).log_det_gram();
  const double log_n = std::log(static_cast<double>(scheme.n));
  const double log_t = std::log(static_cast<double>(scheme.train_size));
  double acc = 0.0;
  for (const IndexList& rows : scheme.samples) {
    const double ldi = GramFactor(submatrix(x, alpha, rows)).log_det_gram();
    acc += alpha.dim() * (log_t - log_n) + ld - ldi;
  }
  return acc / static_cast<double>(scheme.samples.size());
}

}  // namespace

double cond_sum_inverse_risk(const std::vector<ModelAlpha>& models, const Matrix& x,
                             const TruthSpec& truth, int m, int* excluded) {
  check_m(m);
  if (excluded != nullptr) *excluded = 0;
  double sum = 0.0;
  for (const ModelAlpha& alpha : models) {
    const double nr = n_risk(x, alpha, truth);
    if (nr <= 0.0) {
      if (excluded != nullptr) ++*excluded;
      continue;
    }
    sum += 1.0 / ipow(nr, m);
  }
  return sum;
}

std::optional<double> cond_pn_lambda_ratio(const std::vector<ModelAlpha>& models,
                                           const Matrix& x, const TruthSpec& truth,
                                           int train_size) {
  if (models.empty()) throw InvalidInput("need at least one model");
  const double lambda = lambda_n(static_cast<int>(x.rows()), train_size);
  double min_nr = std::numeric_limits<double>::infinity();
  for (const ModelAlpha& alpha : models) {
    min_nr = std::min(min_nr, n_risk(x, alpha, truth));
  }
  if (min_nr <= 0.0) return std::nullopt;
  return max_model_dim(models) * lambda / min_nr;
}

AInReport cond_a_in(const std::vector<ModelAlpha>& models, const Matrix& x,
                    const TrainingScheme& scheme, AInNormalizer normalizer,
                    const TruthSpec* truth) {
  if (models.empty()) throw InvalidInput("need at least one model");
  if (normalizer == AInNormalizer::risk && truth == nullptr) {
    throw InvalidInput("risk normalizer needs a TruthSpec");
  }
  const double n = static_cast<double>(scheme.n);
  const double lambda = lambda_n(scheme.n, scheme.train_size);

  AInReport out;
  out.max_normalized = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (const ModelAlpha& alpha : models) {
    const double mean = mean_a_in_fresh(x, alpha, scheme);
    out.mean_ain.push_back(mean);
    out.max_abs_raw_over_n = std::max(out.max_abs_raw_over_n, std::abs(mean) / n);
    const double norm = normalizer == AInNormalizer::risk ? n_risk(x, alpha, *truth)
                                                          : alpha.dim() * lambda;
    if (norm <= 0.0) {
      ++out.excluded;
      continue;
    }
    out.max_normalized = std::max(out.max_normalized, mean / norm);
    any = true;
  }
  if (!any) out.max_normalized = kNaN;
  return out;
}

std::optional<double> cond_a_in_gap_ratio(const std::vector<ModelAlpha>& correct_models,
                                          const ModelAlpha& alpha_c, const Matrix& x,
                                          const TrainingScheme& scheme) {
  const double lambda = lambda_n(scheme.n, scheme.train_size);
  const double base = mean_a_in_fresh(x, alpha_c, scheme);
  std::optional<double> out;
  for (const ModelAlpha& alpha : correct_models) {
    if (alpha == alpha_c || alpha.dim() == alpha_c.dim()) continue;
    const double ratio =
        (mean_a_in_fresh(x, alpha, scheme) - base) /
        ((alpha.dim() - alpha_c.dim()) * lambda);
    if (!out.has_value() || ratio > *out) out = ratio;
  }
  return out;
}

double cond_identifiability(const std::vector<ModelAlpha>& models, const Matrix& x,
                            const TruthSpec& truth) {
  if (models.empty()) throw InvalidInput("need at least one model");
  double out = std::numeric_limits<double>::infinity();
  for (const ModelAlpha& alpha : models) {
    out = std::min(out, delta_n(x, alpha, truth));
  }
  return out;
}

MiscConditions cond_misc(const Matrix& x, const ModelSpace& space, const TruthSpec& truth,
                         int train_size, int m, std::optional<double> correct_tol) {
  check_m(m);
  const int n = static_cast<int>(x.rows());
  const double lambda = lambda_n(n, train_size);
  const double tol = correct_tol.value_or(default_correct_tol(truth.mu));

  MiscConditions out;
  out.train_frac_log_n =
      (static_cast<double>(train_size) / n) * std::log(static_cast<double>(n));
  out.dim_lambda_over_n = max_model_dim(space.models) * lambda / n;
  out.mean_sq_mu = truth.mu.squaredNorm() / n;

  std::vector<ModelAlpha> correct;
  for (const ModelAlpha& alpha : space.models) {
    try {
      if (is_correct_model(x, truth.mu, alpha, tol)) correct.push_back(alpha);
    } catch (const ComputeError&) {
    }
  }
  out.n_correct = static_cast<int>(correct.size());
  if (correct.empty()) return out;

  const std::vector<double> zeros(correct.size(), 0.0);
  const ModelAlpha alpha_c =
      correct[static_cast<std::size_t>(argmin_with_tiebreak(zeros, correct, nullptr))];

  double inv_dim = 0.0;
  double inv_gap = 0.0;
  for (const ModelAlpha& alpha : correct) {
    inv_dim += 1.0 / ipow(static_cast<double>(alpha.dim()), m);
    if (alpha == alpha_c) continue;
    const int gap = alpha.dim() - alpha_c.dim();
    if (gap == 0) {
      ++out.zero_gap_skipped;
      continue;
    }
    inv_gap += 1.0 / (ipow(lambda, 2 * m) * ipow(static_cast<double>(gap), m));
  }
  out.sum_inv_dim = inv_dim;
  out.sum_inv_lambda_dim_gap = inv_gap;
  return out;
}

UniformRatios empirical_uniform_ratios(const CriterionEngine& engine,
                                       const TruthSpec& truth, const Vector& e) {
  const Matrix& x = engine.design();
  if (truth.mu.size() != x.rows() || e.size() != x.rows()) {
    throw DimensionError("truth/error length does not match design rows");
  }
  const double n = static_cast<double>(x.rows());
  const int k = engine.scheme().validation_size();

  UniformRatios out;
  out.train_bias_bound = (n - k) / n;
  const double mu_scale = truth.mu.squaredNorm();
  for (std::size_t idx = 0; idx < engine.n_models(); ++idx) {
    if (!engine.model_ok(idx)) continue;
    const ModelAlpha& alpha = engine.space().models[idx];
    const Vector pe = engine.fitted_full(idx, e);
    const Vector pmu = engine.fitted_full(idx, truth.mu);
    const Vector bias_res = truth.mu - pmu;
    const double n_delta = bias_res.squaredNorm();
    const double nr = n_delta + truth.sigma2 * alpha.dim();
    if (nr <= 0.0) {
      ++out.excluded_zero_risk;
      continue;
    }
    const double quad = e.dot(pe);
    out.max_quad_gap = std::max(
        out.max_quad_gap, std::abs(quad - truth.sigma2 * alpha.dim()) / nr);
    out.max_cross_ratio = std::max(out.max_cross_ratio, std::abs(e.dot(bias_res)) / nr);
    const double n_loss = (bias_res - pe).squaredNorm();
    out.max_loss_risk_gap = std::max(out.max_loss_risk_gap, std::abs(n_loss / nr - 1.0));

    // fp-zero bias means the model is correct; the bias ratio is 0/0 there.
    if (n_delta <= 1e-18 * mu_scale) {
      ++out.excluded_zero_bias;
      continue;
    }
    const CriterionEngine::Residuals res = engine.residuals(idx, truth.mu);
    double mean_train_bias = 0.0;
    for (double si : res.si) mean_train_bias += si;
    mean_train_bias /= static_cast<double>(res.si.size());
    const double ratio = mean_train_bias / res.s;
    if (!out.max_train_bias_ratio.has_value() || ratio > *out.max_train_bias_ratio) {
      out.max_train_bias_ratio = ratio;
    }
  }
  return out;
}

UniformRatios empirical_uniform_ratios(const ModelSpace& space, const Matrix& x,
                                       const TruthSpec& truth,
                                       const TrainingScheme& scheme, const Vector& e) {
  return empirical_uniform_ratios(CriterionEngine(x, space, scheme), truth, e);
}

SplitIdentityGaps split_identity_gaps(const Matrix& x, const ModelAlpha& alpha,
                                         const Vector& mu,
                                         const IndexList& training_rows) {
  const Index n = x.rows();
  const Matrix xa = submatrix(x, alpha);
  const GramFactor full(xa);
  const Vector res = mu - xa * full.solve(mu);  // (I - P) mu
  const double n_delta = res.squaredNorm();

  std::vector<bool> in_train(static_cast<std::size_t>(n), false);
  for (int r : training_rows) {
    if (r < 1 || r > n) throw DimensionError("training row outside [1, n]");
    in_train[static_cast<std::size_t>(r - 1)] = true;
  }
  IndexList validation_rows;
  double train_part = 0.0;
  double val_part = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double v = res[i] * res[i];
    if (in_train[static_cast<std::size_t>(i)]) {
      train_part += v;
    } else {
      val_part += v;
      validation_rows.push_back(static_cast<int>(i) + 1);
    }
  }

  SplitIdentityGaps out;
  const double scale = std::max(n_delta, 1e-300);
  out.split_rel = std::abs(n_delta - (train_part + val_part)) / scale;

  // Training-block bias and the validation-block complement form.
  const Matrix x1 = submatrix(x, alpha, training_rows);
  const Vector mu1 = [&] {
    Vector v(static_cast<Index>(training_rows.size()));
    for (std::size_t i = 0; i < training_rows.size(); ++i) v[static_cast<Index>(i)] = mu[training_rows[i] - 1];
    return v;
  }();
  const GramFactor f1(x1);
  const double n_delta_train = (mu1 - x1 * f1.solve(mu1)).squaredNorm();

  const Matrix xv = submatrix(x, alpha, validation_rows);
  Vector bmu(static_cast<Index>(validation_rows.size()));
  for (std::size_t i = 0; i < validation_rows.size(); ++i) {
    bmu[static_cast<Index>(i)] = res[validation_rows[i] - 1];
  }
  const Matrix gram = xa.transpose() * xa;
  const Matrix pc = xv * gram.ldlt().solve(xv.transpose());
  const Matrix ipc = Matrix::Identity(pc.rows(), pc.cols()) - pc;
  const Matrix ipc_inv = ipc.inverse();
  const double complement_rhs = bmu.dot(ipc_inv * bmu);
  out.complement_rel = std::abs((n_delta - n_delta_train) - complement_rhs) / scale;

  const Matrix gram1 = x1.transpose() * x1;
  const Matrix alt = Matrix::Identity(pc.rows(), pc.cols()) +
                     xv * gram1.ldlt().solve(xv.transpose());
  const double denom = 1.0 + ipc_inv.cwiseAbs().maxCoeff();
  out.inverse_rel = (ipc_inv - alt).cwiseAbs().maxCoeff() / denom;

  out.psd_slack = complement_rhs - bmu.squaredNorm();
  return out;
}

ConditionReport build_condition_report(const CriterionEngine& engine, int m,
                                       const TruthSpec* truth,
                                       std::optional<double> correct_tol) {
  check_m(m);
  const Matrix& x = engine.design();
  const ModelSpace& space = engine.space();
  const TrainingScheme& scheme = engine.scheme();
  const double n = static_cast<double>(scheme.n);

  ConditionReport rep;
  rep.m = m;
  rep.n = scheme.n;
  rep.train_size = scheme.train_size;
  rep.max_dim = max_model_dim(space.models);
  rep.lambda = lambda_n(scheme.n, scheme.train_size);
  rep.train_frac_log_n = (static_cast<double>(scheme.train_size) / n) * std::log(n);
  rep.dim_lambda_over_n = rep.max_dim * rep.lambda / n;

  for (std::size_t idx = 0; idx < engine.n_models(); ++idx) {
    if (!engine.model_ok(idx)) {
      rep.mean_ain.push_back(kNaN);
      rep.annotations.push_back("model " + std::to_string(idx + 1) +
                                " not evaluable: " + engine.model_error(idx));
      continue;
    }
    const double mean = engine.mean_a_in(idx);
    rep.mean_ain.push_back(mean);
    rep.max_abs_mean_ain_over_n = std::max(rep.max_abs_mean_ain_over_n, std::abs(mean) / n);
  }

  if (truth == nullptr) return rep;

  rep.has_truth = true;
  const double tol = correct_tol.value_or(default_correct_tol(truth->mu));

  // Per-model bias/risk through the engine's cached factorizations.
  std::vector<std::size_t> ok_idx;
  std::vector<double> nr_all;
  std::vector<bool> correct;
  std::vector<ModelAlpha> correct_models;
  double min_delta = std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < engine.n_models(); ++idx) {
    if (!engine.model_ok(idx)) continue;
    const ModelAlpha& alpha = space.models[idx];
    const Vector bias_res = truth->mu - engine.fitted_full(idx, truth->mu);
    const double n_delta = bias_res.squaredNorm();
    ok_idx.push_back(idx);
    nr_all.push_back(n_delta + truth->sigma2 * alpha.dim());
    min_delta = std::min(min_delta, n_delta / n);
    const bool is_corr = n_delta / n <= tol;
    correct.push_back(is_corr);
    if (is_corr) correct_models.push_back(alpha);
  }
  if (ok_idx.empty()) {
    rep.annotations.push_back("no evaluable models; truth-dependent diagnostics omitted");
    return rep;
  }
  rep.n_correct = static_cast<int>(correct_models.size());
  rep.min_bias = min_delta;
  rep.mean_sq_mu = truth->mu.squaredNorm() / n;
  if (min_delta == 0.0) {
    rep.annotations.push_back("minimum bias is exactly zero: model-true regime");
  }

  double sum_all = 0.0, sum_inc = 0.0;
  double min_nr_all = std::numeric_limits<double>::infinity();
  double min_nr_inc = std::numeric_limits<double>::infinity();
  double max_ain_risk = -std::numeric_limits<double>::infinity();
  bool any_inc = false;
  for (std::size_t j = 0; j < ok_idx.size(); ++j) {
    const double nr = nr_all[j];
    sum_all += 1.0 / ipow(nr, m);
    min_nr_all = std::min(min_nr_all, nr);
    max_ain_risk = std::max(max_ain_risk, engine.mean_a_in(ok_idx[j]) / nr);
    if (!correct[j]) {
      any_inc = true;
      sum_inc += 1.0 / ipow(nr, m);
      min_nr_inc = std::min(min_nr_inc, nr);
    }
  }
  rep.sum_inv_risk_all = sum_all;
  rep.dim_lambda_over_min_risk_all = rep.max_dim * rep.lambda / min_nr_all;
  rep.max_mean_ain_over_risk = max_ain_risk;
  if (any_inc) {
    rep.sum_inv_risk_incorrect = sum_inc;
    rep.dim_lambda_over_min_risk_incorrect = rep.max_dim * rep.lambda / min_nr_inc;
  } else {
    rep.annotations.push_back("every model is correct; incorrect-set diagnostics omitted");
  }

  if (!correct_models.empty()) {
    const std::vector<double> zeros(correct_models.size(), 0.0);
    const ModelAlpha alpha_c = correct_models[static_cast<std::size_t>(
        argmin_with_tiebreak(zeros, correct_models, nullptr))];
    rep.alpha_c = alpha_c;

    double max_ratio = -std::numeric_limits<double>::infinity();
    bool any_c = false;
    double base_ain = 0.0;
    for (std::size_t j = 0; j < ok_idx.size(); ++j) {
      if (!correct[j]) continue;
      const ModelAlpha& alpha = space.models[ok_idx[j]];
      const double v = engine.mean_a_in(ok_idx[j]) / (alpha.dim() * rep.lambda);
      max_ratio = std::max(max_ratio, v);
      any_c = true;
      if (alpha == alpha_c) base_ain = engine.mean_a_in(ok_idx[j]);
    }
    if (any_c) rep.max_mean_ain_over_dim_lambda_correct = max_ratio;

    std::optional<double> gap_ratio;
    int zero_gap = 0;
    double inv_dim = 0.0, inv_gap = 0.0;
    for (std::size_t j = 0; j < ok_idx.size(); ++j) {
      if (!correct[j]) continue;
      const ModelAlpha& alpha = space.models[ok_idx[j]];
      inv_dim += 1.0 / ipow(static_cast<double>(alpha.dim()), m);
      if (alpha == alpha_c) continue;
      const int gap = alpha.dim() - alpha_c.dim();
      if (gap == 0) {
        ++zero_gap;
        continue;
      }
      inv_gap += 1.0 / (ipow(rep.lambda, 2 * m) * ipow(static_cast<double>(gap), m));
      const double ratio = (engine.mean_a_in(ok_idx[j]) - base_ain) / (gap * rep.lambda);
      if (!gap_ratio.has_value() || ratio > *gap_ratio) gap_ratio = ratio;
    }
    rep.sum_inv_dim_correct = inv_dim;
    rep.sum_inv_lambda_dim_gap_correct = inv_gap;
    rep.ain_gap_ratio_correct = gap_ratio;
    if (zero_gap > 0) {
      rep.annotations.push_back(std::to_string(zero_gap) +
                                " correct model(s) with the same dimension as the most "
                                "parsimonious one skipped in gap diagnostics");
    }
    rep.annotations.push_back(
        "ain gap ratio is a deterministic design quantity; small values support "
        "consistency");
  }
  return rep;
}

}  // namespace cvsel
