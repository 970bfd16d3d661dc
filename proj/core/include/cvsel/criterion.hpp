#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cvsel/linalg.hpp"
#include "cvsel/model_space.hpp"
#include "cvsel/schemes.hpp"
#include "cvsel/types.hpp"

namespace cvsel {

// Penalty rate log(n / train_size) induced by the training fraction.
double lambda_n(int n, int train_size);

// Design-alignment term for one training sample:
//   p * (log(train) - log n) + log det(X'X) - log det(Xi'Xi).
// Zero exactly when the training Gram is proportional to the full Gram with
// factor train/n, i.e. when the sample is perfectly representative.
double a_in(const Matrix& x, const ModelAlpha& alpha, const IndexList& training_rows);

// Log predictive density of the validation block given the training block,
// noise variance known. Flat prior on the coefficients.
double log_cv_predictive_known_sigma(const Matrix& x, const Vector& y,
                                     const ModelAlpha& alpha,
                                     const IndexList& training_rows, double sigma2);

// Same with unknown variance under the reference prior 1/sigma^2. exact=true
// returns the fully normalized predictive density; exact=false drops the
// alpha-free normalizers and uses the (n/2, (n-k)/2) exponent pair, the form
// whose mean over samples matches the unknown-variance criterion exactly.
double log_cv_predictive_unknown_sigma(const Matrix& x, const Vector& y,
                                       const ModelAlpha& alpha,
                                       const IndexList& training_rows,
                                       bool exact = true);

// Mean over the scheme's samples of the held-out log predictive densities.
// Selection maximizes this; the residual-form criteria below minimize an
// affine transform of it.
double cv_score(const Matrix& x, const Vector& y, const ModelAlpha& alpha,
                const TrainingScheme& scheme, Variant variant,
                std::optional<double> sigma2 = std::nullopt, bool exact = true);

struct CriterionValue {
  ModelAlpha alpha;
  Variant variant = Variant::known_sigma;
  double value = 0.0;      // term_full + term_train + term_det
  double term_full = 0.0;  // full-data residual term
  double term_train = 0.0; // averaged training residual term
  double term_det = 0.0;   // averaged Gram log-determinant gap
  // Mean log predictive density per training sample; for the unknown-variance
  // variant cv_mean is the criterion-equivalent form and cv_mean_exact the
  // fully normalized one (they differ by an alpha-dependent amount, reported
  // so the gap is visible).
  std::optional<double> cv_mean;
  std::optional<double> cv_mean_exact;
};

// Known-variance criterion
//   S/n - (1/(nr)) sum_i S_i + (sigma2/(nr)) sum_i [log det X'X - log det Xi'Xi].
CriterionValue gamma_known(const Matrix& x, const Vector& y, const ModelAlpha& alpha,
                           const TrainingScheme& scheme, double sigma2);

// Unknown-variance criterion
//   log S - ((n-k)/(nr)) sum_i log S_i + (1/(nr)) sum_i [log det X'X - log det Xi'Xi].
CriterionValue gamma_unknown(const Matrix& x, const Vector& y, const ModelAlpha& alpha,
                             const TrainingScheme& scheme);

// Centered form: log(S/(n s2)) - ((n-k)/(nr)) sum_i log(S_i/(n s2))
//   + (1/(nr)) sum_i a_in + dim * lambda_n / n.
// Equals gamma_unknown - (k/n) log(n s2) for every model, so the minimizer
// does not depend on s2_ref.
double gamma1_unknown(const Matrix& x, const Vector& y, const ModelAlpha& alpha,
                      const TrainingScheme& scheme, double sigma2_ref);

struct SelectionReport {
  Variant variant = Variant::known_sigma;
  std::optional<double> sigma2;
  std::vector<CriterionValue> values;  // successfully evaluated models, input order
  std::vector<std::pair<ModelAlpha, std::string>> failed;
  ModelAlpha selected;
  int selected_index = -1;  // index into values
  bool tie_broken = false;
};

// Evaluates the criterion for every model and picks the minimizer. Exact value
// ties are broken toward the smaller dimension, then lexicographically.
// Models that fail to evaluate are reported, not fatal, unless all fail.
SelectionReport select_model(const ModelSpace& space, const Matrix& x, const Vector& y,
                             const TrainingScheme& scheme, Variant variant,
                             std::optional<double> sigma2 = std::nullopt);

// Point predictions X(alpha) beta_hat(alpha) from the full-data fit.
Vector predict_future(const Matrix& x, const Vector& y, const ModelAlpha& alpha);

// Shared factorization cache for evaluating many responses against one
// (design, model space, scheme) triple: the Monte Carlo path. All Gram
// factorizations and log-determinants are computed once, per-response work is
// residual sums only.
class CriterionEngine {
 public:
  CriterionEngine(const Matrix& x, const ModelSpace& space, const TrainingScheme& scheme);

  const ModelSpace& space() const { return space_; }
  const TrainingScheme& scheme() const { return scheme_; }
  const Matrix& design() const { return x_; }

  std::size_t n_models() const { return prepared_.size(); }
  bool model_ok(std::size_t idx) const { return prepared_[idx].ok; }
  const std::string& model_error(std::size_t idx) const { return prepared_[idx].error; }

  double log_det_full(std::size_t idx) const;
  const std::vector<double>& log_det_train(std::size_t idx) const;
  // a_in values per training sample and their mean over samples.
  const std::vector<double>& a_in_values(std::size_t idx) const;
  double mean_a_in(std::size_t idx) const;

  struct Residuals {
    double s = 0.0;               // full-data RSS
    std::vector<double> si;       // per-training-sample RSS
  };
  Residuals residuals(std::size_t idx, const Vector& y) const;

  // Full-data fitted values X(alpha) beta_hat; the cached path for losses.
  Vector fitted_full(std::size_t idx, const Vector& y) const;

  CriterionValue evaluate(std::size_t idx, const Vector& y, Variant variant,
                          std::optional<double> sigma2) const;

  SelectionReport select(const Vector& y, Variant variant,
                         std::optional<double> sigma2) const;

 private:
  struct PreparedModel {
    ModelAlpha alpha;
    bool ok = false;
    std::string error;
    std::optional<GramFactor> full;
    std::vector<GramFactor> train;
    double ld_full = 0.0;
    std::vector<double> ld_train;
    std::vector<double> a_in;
    double mean_a_in = 0.0;
  };

  const PreparedModel& checked(std::size_t idx) const;

  Matrix x_;
  ModelSpace space_;
  TrainingScheme scheme_;
  std::vector<PreparedModel> prepared_;
};

}  // namespace cvsel
