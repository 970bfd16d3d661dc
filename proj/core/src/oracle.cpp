#include "cvsel/oracle.hpp"

#include <cmath>
#include <limits>

#include "cvsel/errors.hpp"
#include "cvsel/linalg.hpp"

namespace cvsel {

namespace {

void check_truth(const Matrix& x, const TruthSpec& truth) {
  if (truth.mu.size() != x.rows()) {
    throw DimensionError("truth mean length does not match design rows");
  }
  if (!(truth.sigma2 > 0.0) || !std::isfinite(truth.sigma2)) {
    throw InvalidInput("truth sigma2 must be positive and finite");
  }
}

}  // namespace

double loss(const Matrix& x, const Vector& y, const ModelAlpha& alpha,
            const TruthSpec& truth) {
  check_truth(x, truth);
  const ProjectionResult pr = project(submatrix(x, alpha), y);
  return (truth.mu - pr.projection).squaredNorm() / static_cast<double>(x.rows());
}

double delta_n(const Matrix& x, const ModelAlpha& alpha, const TruthSpec& truth) {
  check_truth(x, truth);
  const ProjectionResult pr = project(submatrix(x, alpha), truth.mu);
  return pr.residual.squaredNorm() / static_cast<double>(x.rows());
}

double risk(const Matrix& x, const ModelAlpha& alpha, const TruthSpec& truth) {
  return delta_n(x, alpha, truth) +
         truth.sigma2 * alpha.dim() / static_cast<double>(x.rows());
}

OracleResult oracle_model(const ModelSpace& space, const Matrix& x, const Vector& y,
                          const TruthSpec& truth) {
  const LossProfile profile = loss_profile(space, x, y, truth);
  return profile.oracle;
}

std::optional<ModelAlpha> parsimonious_correct(const ModelSpace& space, const Matrix& x,
                                               const TruthSpec& truth, double tol) {
  check_truth(x, truth);
  std::vector<ModelAlpha> correct;
  for (const ModelAlpha& alpha : space.models) {
    try {
      if (is_correct_model(x, truth.mu, alpha, tol)) correct.push_back(alpha);
    } catch (const ComputeError&) {
      // not evaluable, so not demonstrably correct
    }
  }
  if (correct.empty()) return std::nullopt;
  // Constant values reduce the argmin to its tie-break: smallest dim, then lex.
  const std::vector<double> zeros(correct.size(), 0.0);
  return correct[static_cast<std::size_t>(argmin_with_tiebreak(zeros, correct, nullptr))];
}

std::optional<ModelAlpha> parsimonious_correct(const ModelSpace& space, const Matrix& x,
                                               const TruthSpec& truth) {
  return parsimonious_correct(space, x, truth, default_correct_tol(truth.mu));
}

LossProfile loss_profile(const ModelSpace& space, const Matrix& x, const Vector& y,
                         const TruthSpec& truth) {
  check_truth(x, truth);
  if (y.size() != x.rows()) throw DimensionError("response length does not match design");
  const double n = static_cast<double>(x.rows());
  const double nan = std::numeric_limits<double>::quiet_NaN();

  LossProfile out;
  out.ok.resize(space.models.size(), false);
  out.loss.resize(space.models.size(), nan);
  out.delta.resize(space.models.size(), nan);
  out.risk.resize(space.models.size(), nan);

  std::vector<double> ok_losses;
  std::vector<ModelAlpha> ok_models;
  std::vector<int> ok_indices;
  for (std::size_t j = 0; j < space.models.size(); ++j) {
    const ModelAlpha& alpha = space.models[j];
    try {
      const GramFactor f(submatrix(x, alpha));
      const Vector fitted_y = f.design() * f.solve(y);
      const Vector fitted_mu = f.design() * f.solve(truth.mu);
      out.loss[j] = (truth.mu - fitted_y).squaredNorm() / n;
      out.delta[j] = (truth.mu - fitted_mu).squaredNorm() / n;
      out.risk[j] = out.delta[j] + truth.sigma2 * alpha.dim() / n;
      out.ok[j] = true;
      ok_losses.push_back(out.loss[j]);
      ok_models.push_back(alpha);
      ok_indices.push_back(static_cast<int>(j));
    } catch (const std::exception&) {
      // left as NaN / not ok
    }
  }
  if (ok_losses.empty()) {
    throw SelectionFailedError("no candidate model could be evaluated for the oracle");
  }
  bool tie = false;
  const int local = argmin_with_tiebreak(ok_losses, ok_models, &tie);
  out.oracle.alpha = ok_models[static_cast<std::size_t>(local)];
  out.oracle.index = ok_indices[static_cast<std::size_t>(local)];
  out.oracle.loss = ok_losses[static_cast<std::size_t>(local)];
  out.oracle.tie_broken = tie;
  out.parsimonious = parsimonious_correct(space, x, truth);
  return out;
}

}  // namespace cvsel
