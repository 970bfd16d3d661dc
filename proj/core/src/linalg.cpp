#include "cvsel/linalg.hpp"

#include <cmath>
#include <string>

namespace cvsel {

GramFactor::GramFactor(const Matrix& x) : x_(x), qr_(x) {
  const Index m = x.rows();
  const Index p = x.cols();
  if (p < 1) throw DimensionError("design matrix needs at least one column");
  if (m < p) {
    throw DimensionError("design matrix has " + std::to_string(m) + " rows but " +
                         std::to_string(p) + " columns; rows >= columns required");
  }
  rdiag_ = qr_.matrixQR().diagonal().head(p);
  tol_ = 1e-10 * rdiag_.cwiseAbs().maxCoeff();
  full_rank_ = (rdiag_.cwiseAbs().minCoeff() > tol_);
}

Matrix GramFactor::r() const {
  const Index p = x_.cols();
  Matrix r = qr_.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  for (Index j = 0; j < p; ++j) {
    if (r(j, j) < 0.0) r.row(j) = -r.row(j);
  }
  return r;
}

double GramFactor::log_det_gram() const {
  if (!full_rank_) throw SingularGramError("Gram matrix is numerically singular");
  double acc = 0.0;
  for (Index j = 0; j < rdiag_.size(); ++j) acc += std::log(std::abs(rdiag_[j]));
  return 2.0 * acc;
}

Vector GramFactor::solve(const Vector& y) const {
  if (y.size() != x_.rows()) {
    throw DimensionError("response length " + std::to_string(y.size()) +
                         " does not match design rows " + std::to_string(x_.rows()));
  }
  if (!full_rank_) throw SingularGramError("Gram matrix is numerically singular");
  return qr_.solve(y);
}

GramFactor factor(const Matrix& x) { return GramFactor(x); }

FitSummary ls_fit(const GramFactor& f, const Vector& y) {
  FitSummary out;
  out.beta = f.solve(y);
  out.fitted = f.design() * out.beta;
  out.rss = (y - out.fitted).squaredNorm();
  out.log_det_gram = f.log_det_gram();
  return out;
}

FitSummary ls_fit(const Matrix& x, const Vector& y) { return ls_fit(GramFactor(x), y); }

double log_det_gram(const Matrix& x) { return GramFactor(x).log_det_gram(); }

ProjectionResult project(const GramFactor& f, const Vector& v) {
  ProjectionResult out;
  out.projection = f.design() * f.solve(v);
  out.residual = v - out.projection;
  return out;
}

ProjectionResult project(const Matrix& x, const Vector& v) {
  return project(GramFactor(x), v);
}

}  // namespace cvsel
