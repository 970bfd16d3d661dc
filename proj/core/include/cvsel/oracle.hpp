#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cvsel/model_space.hpp"
#include "cvsel/types.hpp"

namespace cvsel {

// The data-generating truth: mean vector and noise variance. sigma2 is the
// evaluator's knowledge; selectors may still treat the variance as unknown.
struct TruthSpec {
  Vector mu;
  double sigma2 = 1.0;
};

// Squared-error loss of the model's fit against the truth: ||mu - P(alpha) y||^2 / n.
double loss(const Matrix& x, const Vector& y, const ModelAlpha& alpha,
            const TruthSpec& truth);

// Squared bias mu'(I - P(alpha))mu / n, computed via the projection residual.
double delta_n(const Matrix& x, const ModelAlpha& alpha, const TruthSpec& truth);

// Risk E loss = delta + sigma2 * dim / n.
double risk(const Matrix& x, const ModelAlpha& alpha, const TruthSpec& truth);

struct OracleResult {
  ModelAlpha alpha;
  int index = -1;  // into space.models
  double loss = 0.0;
  bool tie_broken = false;
};

// Loss minimizer over the space, ties broken exactly as in select_model.
// Models that cannot be evaluated are skipped; throws if none can.
OracleResult oracle_model(const ModelSpace& space, const Matrix& x, const Vector& y,
                          const TruthSpec& truth);

// Minimum-dimension correct model (lexicographic tie-break), if any is correct.
std::optional<ModelAlpha> parsimonious_correct(const ModelSpace& space, const Matrix& x,
                                               const TruthSpec& truth, double tol);
std::optional<ModelAlpha> parsimonious_correct(const ModelSpace& space, const Matrix& x,
                                               const TruthSpec& truth);

struct LossProfile {
  std::vector<bool> ok;         // aligned with space.models
  std::vector<double> loss;     // NaN where !ok
  std::vector<double> delta;
  std::vector<double> risk;
  OracleResult oracle;
  std::optional<ModelAlpha> parsimonious;
};

LossProfile loss_profile(const ModelSpace& space, const Matrix& x, const Vector& y,
                         const TruthSpec& truth);

}  // namespace cvsel
