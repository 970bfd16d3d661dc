#pragma once

#include <Eigen/QR>

#include "cvsel/errors.hpp"
#include "cvsel/types.hpp"

namespace cvsel {

// Householder QR of a design matrix X (m x p, m >= p >= 1), deliberately
// unpivoted so that R'R reproduces X'X exactly (column pivoting would permute
// the Gram matrix). Rank is judged against eps = 1e-10 * max_j |R_jj|.
class GramFactor {
 public:
  explicit GramFactor(const Matrix& x);

  Index rows() const { return x_.rows(); }
  Index cols() const { return x_.cols(); }
  const Matrix& design() const { return x_; }

  bool full_rank() const { return full_rank_; }
  double rank_tolerance() const { return tol_; }

  // R with the sign convention R_jj >= 0, making it the Cholesky factor of X'X.
  Matrix r() const;

  // log det(X'X) = 2 * sum_j log |R_jj|. Throws SingularGramError if rank deficient.
  double log_det_gram() const;

  // Least-squares solution argmin_b ||y - X b||. Throws on dimension mismatch
  // or rank deficiency.
  Vector solve(const Vector& y) const;

 private:
  Matrix x_;
  Eigen::HouseholderQR<Matrix> qr_;
  Vector rdiag_;
  double tol_ = 0.0;
  bool full_rank_ = false;
};

struct FitSummary {
  Vector beta;
  Vector fitted;
  double rss = 0.0;
  double log_det_gram = 0.0;
};

struct ProjectionResult {
  Vector projection;
  Vector residual;
};

GramFactor factor(const Matrix& x);

FitSummary ls_fit(const Matrix& x, const Vector& y);
FitSummary ls_fit(const GramFactor& f, const Vector& y);

double log_det_gram(const Matrix& x);

// Orthogonal projection of v onto the column span of X and its complement.
ProjectionResult project(const Matrix& x, const Vector& v);
ProjectionResult project(const GramFactor& f, const Vector& v);

}  // namespace cvsel
