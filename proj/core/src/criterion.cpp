#include "cvsel/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cvsel/errors.hpp"

namespace cvsel {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)

void check_sigma2(std::optional<double> sigma2) {
  if (!sigma2.has_value()) {
    throw InvalidInput("known-variance evaluation requires sigma2");
  }
  if (!(*sigma2 > 0.0) || !std::isfinite(*sigma2)) {
    throw InvalidInput("sigma2 must be positive and finite");
  }
}

void check_xy(const Matrix& x, const Vector& y) {
  if (y.size() != x.rows()) {
    throw DimensionError("response length " + std::to_string(y.size()) +
                         " does not match design rows " + std::to_string(x.rows()));
  }
}

void check_training_rows(const IndexList& rows, Index n) {
  if (rows.empty()) throw DimensionError("empty training sample");
  if (static_cast<Index>(rows.size()) >= n) {
    throw DimensionError("training sample must leave at least one validation row");
  }
  IndexList sorted = rows;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] < 1 || sorted[i] > n) {
      throw DimensionError("training row " + std::to_string(sorted[i]) + " outside [1, " +
                           std::to_string(n) + "]");
    }
    if (i > 0 && sorted[i] == sorted[i - 1]) {
      throw DimensionError("duplicate training row " + std::to_string(sorted[i]));
    }
  }
}

Vector gather(const Vector& y, const IndexList& rows) {
  Vector out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out[static_cast<Index>(i)] = y[rows[i] - 1];
  }
  return out;
}

// Residual sums of squares at or below this fraction of ||y||^2 are
// indistinguishable from exact interpolation in double precision.
bool numerically_zero_rss(double rss, double y_sqnorm) {
  return rss <= 1e-20 * y_sqnorm;
}

struct SampleTerms {
  int n = 0;
  int k = 0;  // validation size
  int p = 0;
  double s = 0.0;
  double si = 0.0;
  double ld = 0.0;
  double ldi = 0.0;
};

double known_log_predictive(const SampleTerms& t, double sigma2) {
  return -0.5 * t.k * (kLog2Pi + std::log(sigma2)) - 0.5 * (t.ld - t.ldi) -
         (t.s - t.si) / (2.0 * sigma2);
}

void check_unknown_terms(const SampleTerms& t, double y_sqnorm, double yi_sqnorm) {
  if (t.n - t.k <= t.p) {
    throw InsufficientDataError("training size " + std::to_string(t.n - t.k) +
                                " must exceed model dimension " + std::to_string(t.p) +
                                " for unknown-variance evaluation");
  }
  if (numerically_zero_rss(t.s, y_sqnorm)) {
    throw ZeroResidualError("full-data residual sum of squares is numerically zero");
  }
  if (numerically_zero_rss(t.si, yi_sqnorm)) {
    throw ZeroResidualError("training residual sum of squares is numerically zero");
  }
}

double unknown_log_predictive(const SampleTerms& t, bool exact) {
  const double n = t.n;
  const double k = t.k;
  const double p = t.p;
  double v = 0.5 * (t.ldi - t.ld) - 0.5 * n * std::log(t.s) +
             0.5 * (n - k) * std::log(t.si);
  if (exact) {
    v += -0.5 * k * std::log(std::numbers::pi) + std::lgamma(0.5 * (n - p)) -
         std::lgamma(0.5 * (n - k - p)) + 0.5 * p * (std::log(t.s) - std::log(t.si));
  }
  return v;
}

// Everything needed to evaluate any criterion form for one model.
struct EvalInputs {
  int n = 0;
  int k = 0;
  int p = 0;
  int r = 0;
  double s = 0.0;
  const std::vector<double>* si = nullptr;
  double ld = 0.0;
  const std::vector<double>* ldi = nullptr;
  double y_sqnorm = 0.0;
  const std::vector<double>* yi_sqnorm = nullptr;
};

SampleTerms sample_terms(const EvalInputs& in, int i) {
  return SampleTerms{in.n, in.k, in.p, in.s, (*in.si)[static_cast<std::size_t>(i)],
                     in.ld, (*in.ldi)[static_cast<std::size_t>(i)]};
}

CriterionValue eval_known(const EvalInputs& in, const ModelAlpha& alpha, double sigma2) {
  CriterionValue out;
  out.alpha = alpha;
  out.variant = Variant::known_sigma;
  const double n = in.n;
  const double nr = n * in.r;
  double sum_si = 0.0;
  double sum_det = 0.0;
  double sum_cv = 0.0;
  for (int i = 0; i < in.r; ++i) {
    const SampleTerms t = sample_terms(in, i);
    sum_si += t.si;
    sum_det += t.ld - t.ldi;
    sum_cv += known_log_predictive(t, sigma2);
  }
  out.term_full = in.s / n;
  out.term_train = -sum_si / nr;
  out.term_det = sigma2 * sum_det / nr;
  out.value = out.term_full + out.term_train + out.term_det;
  out.cv_mean = sum_cv / in.r;
  if (!std::isfinite(out.value)) throw ComputeError("criterion value is not finite");
  return out;
}

CriterionValue eval_unknown(const EvalInputs& in, const ModelAlpha& alpha) {
  CriterionValue out;
  out.alpha = alpha;
  out.variant = Variant::unknown_sigma;
  const double n = in.n;
  const double nr = n * in.r;
  double sum_log_si = 0.0;
  double sum_det = 0.0;
  double sum_cv = 0.0;
  double sum_cv_exact = 0.0;
  for (int i = 0; i < in.r; ++i) {
    const SampleTerms t = sample_terms(in, i);
    check_unknown_terms(t, in.y_sqnorm, (*in.yi_sqnorm)[static_cast<std::size_t>(i)]);
    sum_log_si += std::log(t.si);
    sum_det += t.ld - t.ldi;
    sum_cv += unknown_log_predictive(t, false);
    sum_cv_exact += unknown_log_predictive(t, true);
  }
  out.term_full = std::log(in.s);
  out.term_train = -(n - in.k) * sum_log_si / nr;
  out.term_det = sum_det / nr;
  out.value = out.term_full + out.term_train + out.term_det;
  out.cv_mean = sum_cv / in.r;
  out.cv_mean_exact = sum_cv_exact / in.r;
  if (!std::isfinite(out.value)) throw ComputeError("criterion value is not finite");
  return out;
}

CriterionValue eval_gamma(const EvalInputs& in, const ModelAlpha& alpha, Variant variant,
                          std::optional<double> sigma2) {
  if (variant == Variant::known_sigma) {
    check_sigma2(sigma2);
    return eval_known(in, alpha, *sigma2);
  }
  return eval_unknown(in, alpha);
}

// Fresh factorizations for the one-off (non-engine) entry points.
struct FreshPieces {
  int n, k, p, r;
  double s = 0.0;
  std::vector<double> si;
  double ld = 0.0;
  std::vector<double> ldi;
  std::vector<double> ain;
  double y_sqnorm = 0.0;
  std::vector<double> yi_sqnorm;

  EvalInputs inputs() const {
    return EvalInputs{n, k, p, r, s, &si, ld, &ldi, y_sqnorm, &yi_sqnorm};
  }
};

FreshPieces compute_pieces(const Matrix& x, const Vector& y, const ModelAlpha& alpha,
                           const TrainingScheme& scheme) {
  check_xy(x, y);
  if (scheme.n != x.rows()) {
    throw DimensionError("scheme built for n = " + std::to_string(scheme.n) +
                         " but design has " + std::to_string(x.rows()) + " rows");
  }
  FreshPieces out{static_cast<int>(x.rows()), scheme.validation_size(), alpha.dim(),
                  scheme.r()};
  const Matrix xa = submatrix(x, alpha);
  const GramFactor full(xa);
  out.ld = full.log_det_gram();
  const FitSummary fit = ls_fit(full, y);
  out.s = fit.rss;
  out.y_sqnorm = y.squaredNorm();
  const double log_n = std::log(static_cast<double>(out.n));
  const double log_t = std::log(static_cast<double>(scheme.train_size));
  for (const IndexList& rows : scheme.samples) {
    const GramFactor fi(submatrix(x, alpha, rows));
    const double ldi = fi.log_det_gram();
    const Vector yi = gather(y, rows);
    out.ldi.push_back(ldi);
    out.si.push_back(ls_fit(fi, yi).rss);
    out.yi_sqnorm.push_back(yi.squaredNorm());
    out.ain.push_back(out.p * (log_t - log_n) + out.ld - ldi);
  }
  return out;
}

}  // namespace

double lambda_n(int n, int train_size) {
  if (n < 2 || train_size < 1 || train_size >= n) {
    throw SchemeError("train_size " + std::to_string(train_size) +
                      " must lie in [1, n-1] with n = " + std::to_string(n));
  }
  return std::log(static_cast<double>(n) / static_cast<double>(train_size));
}

double a_in(const Matrix& x, const ModelAlpha& alpha, const IndexList& training_rows) {
  check_training_rows(training_rows, x.rows());
  const double ld = GramFactor(submatrix(x, alpha)).log_det_gram();
  const double ldi = GramFactor(submatrix(x, alpha, training_rows)).log_det_gram();
  const double p = alpha.dim();
  return p * (std::log(static_cast<double>(training_rows.size())) -
              std::log(static_cast<double>(x.rows()))) +
         ld - ldi;
}

namespace {

SampleTerms one_sample_terms(const Matrix& x, const Vector& y, const ModelAlpha& alpha,
                             const IndexList& training_rows, double* y_sqnorm,
                             double* yi_sqnorm) {
  check_xy(x, y);
  check_training_rows(training_rows, x.rows());
  SampleTerms t;
  t.n = static_cast<int>(x.rows());
  t.k = t.n - static_cast<int>(training_rows.size());
  t.p = alpha.dim();
  const GramFactor full(submatrix(x, alpha));
  t.ld = full.log_det_gram();
  t.s = ls_fit(full, y).rss;
  const GramFactor fi(submatrix(x, alpha, training_rows));
  t.ldi = fi.log_det_gram();
  const Vector yi = gather(y, training_rows);
  t.si = ls_fit(fi, yi).rss;
  *y_sqnorm = y.squaredNorm();
  *yi_sqnorm = yi.squaredNorm();
  return t;
}

}  // namespace

double log_cv_predictive_known_sigma(const Matrix& x, const Vector& y,
                                     const ModelAlpha& alpha,
                                     const IndexList& training_rows, double sigma2) {
  check_sigma2(sigma2);
  double ysq = 0.0, yisq = 0.0;
  const SampleTerms t = one_sample_terms(x, y, alpha, training_rows, &ysq, &yisq);
  return known_log_predictive(t, sigma2);
}

double log_cv_predictive_unknown_sigma(const Matrix& x, const Vector& y,
                                       const ModelAlpha& alpha,
                                       const IndexList& training_rows, bool exact) {
  double ysq = 0.0, yisq = 0.0;
  const SampleTerms t = one_sample_terms(x, y, alpha, training_rows, &ysq, &yisq);
  check_unknown_terms(t, ysq, yisq);
  return unknown_log_predictive(t, exact);
}

double cv_score(const Matrix& x, const Vector& y, const ModelAlpha& alpha,
                const TrainingScheme& scheme, Variant variant,
                std::optional<double> sigma2, bool exact) {
  const FreshPieces pieces = compute_pieces(x, y, alpha, scheme);
  const EvalInputs in = pieces.inputs();
  double sum = 0.0;
  for (int i = 0; i < in.r; ++i) {
    const SampleTerms t = sample_terms(in, i);
    if (variant == Variant::known_sigma) {
      check_sigma2(sigma2);
      sum += known_log_predictive(t, *sigma2);
    } else {
      check_unknown_terms(t, in.y_sqnorm, pieces.yi_sqnorm[static_cast<std::size_t>(i)]);
      sum += unknown_log_predictive(t, exact);
    }
  }
  return sum / in.r;
}

CriterionValue gamma_known(const Matrix& x, const Vector& y, const ModelAlpha& alpha,
                           const TrainingScheme& scheme, double sigma2) {
  check_sigma2(sigma2);
  const FreshPieces pieces = compute_pieces(x, y, alpha, scheme);
  return eval_known(pieces.inputs(), alpha, sigma2);
}

CriterionValue gamma_unknown(const Matrix& x, const Vector& y, const ModelAlpha& alpha,
                             const TrainingScheme& scheme) {
  const FreshPieces pieces = compute_pieces(x, y, alpha, scheme);
  return eval_unknown(pieces.inputs(), alpha);
}

double gamma1_unknown(const Matrix& x, const Vector& y, const ModelAlpha& alpha,
                      const TrainingScheme& scheme, double sigma2_ref) {
  if (!(sigma2_ref > 0.0) || !std::isfinite(sigma2_ref)) {
    throw InvalidInput("sigma2_ref must be positive and finite");
  }
  const FreshPieces pieces = compute_pieces(x, y, alpha, scheme);
  const EvalInputs in = pieces.inputs();
  const double n = in.n;
  const double nr = n * in.r;
  const double ns2 = n * sigma2_ref;
  double sum_log_si = 0.0;
  double sum_ain = 0.0;
  for (int i = 0; i < in.r; ++i) {
    const SampleTerms t = sample_terms(in, i);
    check_unknown_terms(t, in.y_sqnorm, pieces.yi_sqnorm[static_cast<std::size_t>(i)]);
    sum_log_si += std::log(t.si / ns2);
    sum_ain += pieces.ain[static_cast<std::size_t>(i)];
  }
  return std::log(in.s / ns2) - (n - in.k) * sum_log_si / nr + sum_ain / nr +
         in.p * lambda_n(in.n, scheme.train_size) / n;
}

SelectionReport select_model(const ModelSpace& space, const Matrix& x, const Vector& y,
                             const TrainingScheme& scheme, Variant variant,
                             std::optional<double> sigma2) {
  return CriterionEngine(x, space, scheme).select(y, variant, sigma2);
}

Vector predict_future(const Matrix& x, const Vector& y, const ModelAlpha& alpha) {
  return project(submatrix(x, alpha), y).projection;
}

CriterionEngine::CriterionEngine(const Matrix& x, const ModelSpace& space,
                                 const TrainingScheme& scheme)
    : x_(x), space_(space), scheme_(scheme) {
  if (scheme.n != x.rows()) {
    throw DimensionError("scheme built for n = " + std::to_string(scheme.n) +
                         " but design has " + std::to_string(x.rows()) + " rows");
  }
  if (space.ambient_p > x.cols()) {
    throw DimensionError("model space indexes " + std::to_string(space.ambient_p) +
                         " columns but design has " + std::to_string(x.cols()));
  }
  if (!validate_scheme(scheme).ok()) {
    throw SchemeError("training scheme is not balanced with equal sample sizes");
  }
  const double log_n = std::log(static_cast<double>(scheme.n));
  const double log_t = std::log(static_cast<double>(scheme.train_size));
  prepared_.reserve(space.models.size());
  for (const ModelAlpha& alpha : space.models) {
    PreparedModel pm;
    pm.alpha = alpha;
    try {
      pm.full.emplace(submatrix(x, alpha));
      pm.ld_full = pm.full->log_det_gram();
      pm.train.reserve(scheme.samples.size());
      for (const IndexList& rows : scheme.samples) {
        pm.train.emplace_back(submatrix(x, alpha, rows));
        pm.ld_train.push_back(pm.train.back().log_det_gram());
        pm.a_in.push_back(alpha.dim() * (log_t - log_n) + pm.ld_full -
                          pm.ld_train.back());
      }
      pm.mean_a_in = 0.0;
      for (double v : pm.a_in) pm.mean_a_in += v;
      pm.mean_a_in /= static_cast<double>(pm.a_in.size());
      pm.ok = true;
    } catch (const std::exception& e) {
      pm.ok = false;
      pm.error = e.what();
      pm.full.reset();
      pm.train.clear();
      pm.ld_train.clear();
      pm.a_in.clear();
    }
    prepared_.push_back(std::move(pm));
  }
}

const CriterionEngine::PreparedModel& CriterionEngine::checked(std::size_t idx) const {
  const PreparedModel& pm = prepared_.at(idx);
  if (!pm.ok) throw ComputeError("model failed to prepare: " + pm.error);
  return pm;
}

double CriterionEngine::log_det_full(std::size_t idx) const { return checked(idx).ld_full; }

const std::vector<double>& CriterionEngine::log_det_train(std::size_t idx) const {
  return checked(idx).ld_train;
}

const std::vector<double>& CriterionEngine::a_in_values(std::size_t idx) const {
  return checked(idx).a_in;
}

double CriterionEngine::mean_a_in(std::size_t idx) const { return checked(idx).mean_a_in; }

CriterionEngine::Residuals CriterionEngine::residuals(std::size_t idx,
                                                      const Vector& y) const {
  check_xy(x_, y);
  const PreparedModel& pm = checked(idx);
  Residuals out;
  out.s = (y - pm.full->design() * pm.full->solve(y)).squaredNorm();
  out.si.reserve(pm.train.size());
  for (std::size_t i = 0; i < pm.train.size(); ++i) {
    const Vector yi = gather(y, scheme_.samples[i]);
    out.si.push_back((yi - pm.train[i].design() * pm.train[i].solve(yi)).squaredNorm());
  }
  return out;
}

Vector CriterionEngine::fitted_full(std::size_t idx, const Vector& y) const {
  check_xy(x_, y);
  const PreparedModel& pm = checked(idx);
  return pm.full->design() * pm.full->solve(y);
}

CriterionValue CriterionEngine::evaluate(std::size_t idx, const Vector& y, Variant variant,
                                         std::optional<double> sigma2) const {
  const PreparedModel& pm = checked(idx);
  const Residuals res = residuals(idx, y);
  std::vector<double> yi_sqnorm;
  yi_sqnorm.reserve(scheme_.samples.size());
  for (const IndexList& rows : scheme_.samples) {
    yi_sqnorm.push_back(gather(y, rows).squaredNorm());
  }
  EvalInputs in{static_cast<int>(x_.rows()), scheme_.validation_size(), pm.alpha.dim(),
                scheme_.r(),  res.s, &res.si, pm.ld_full, &pm.ld_train,
                y.squaredNorm(), &yi_sqnorm};
  return eval_gamma(in, pm.alpha, variant, sigma2);
}

SelectionReport CriterionEngine::select(const Vector& y, Variant variant,
                                        std::optional<double> sigma2) const {
  if (variant == Variant::known_sigma) check_sigma2(sigma2);
  SelectionReport report;
  report.variant = variant;
  if (variant == Variant::known_sigma) report.sigma2 = sigma2;
  std::vector<double> values;
  std::vector<ModelAlpha> models;
  for (std::size_t idx = 0; idx < prepared_.size(); ++idx) {
    if (!prepared_[idx].ok) {
      report.failed.emplace_back(prepared_[idx].alpha, prepared_[idx].error);
      continue;
    }
    try {
      CriterionValue cv = evaluate(idx, y, variant, sigma2);
      values.push_back(cv.value);
      models.push_back(cv.alpha);
      report.values.push_back(std::move(cv));
    } catch (const ComputeError& e) {
      report.failed.emplace_back(prepared_[idx].alpha, e.what());
    }
  }
  if (report.values.empty()) {
    std::string why = "no candidate model could be evaluated";
    if (!report.failed.empty()) why += "; first failure: " + report.failed.front().second;
    throw SelectionFailedError(why);
  }
  report.selected_index = argmin_with_tiebreak(values, models, &report.tie_broken);
  report.selected = models[static_cast<std::size_t>(report.selected_index)];
  return report;
}

}  // namespace cvsel
