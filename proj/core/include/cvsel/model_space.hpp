#pragma once

#include <cstddef>
#include <vector>

#include "cvsel/linalg.hpp"
#include "cvsel/types.hpp"

namespace cvsel {

// A candidate model: a sorted, duplicate-free set of 1-based design columns.
struct ModelAlpha {
  IndexList columns;

  int dim() const { return static_cast<int>(columns.size()); }

  friend bool operator==(const ModelAlpha& a, const ModelAlpha& b) {
    return a.columns == b.columns;
  }
  // Lexicographic order on columns; used only as the final tie-break key.
  friend bool operator<(const ModelAlpha& a, const ModelAlpha& b) {
    return a.columns < b.columns;
  }
};

struct ModelSpace {
  int ambient_p = 0;
  std::vector<ModelAlpha> models;

  std::size_t size() const { return models.size(); }
};

struct SpaceSpec {
  enum class Kind { nested, all_subsets, explicit_list };

  Kind kind = Kind::nested;
  int ambient_p = 0;
  int max_size = 0;  // all_subsets only; 0 means ambient_p
  std::vector<ModelAlpha> models;  // explicit_list only
  std::size_t cap = 1'000'000;     // refuse to enumerate more than this
};

// Builds the model space. Nested: {1}, {1,2}, ..., {1..p}. All-subsets: every
// nonempty subset with at most max_size columns, size-major then lexicographic.
// Explicit lists are validated (indices in [1, p], sorted unique, no duplicate
// models, nonempty). Throws ModelSpaceError if the enumeration would exceed cap.
ModelSpace enumerate_models(const SpaceSpec& spec);

// Column selection X(alpha); optionally restricted to 1-based rows.
Matrix submatrix(const Matrix& x, const ModelAlpha& alpha);
Matrix submatrix(const Matrix& x, const ModelAlpha& alpha, const IndexList& rows);

// Index of the smallest value; exact ties broken toward the smaller model
// dimension, then lexicographically on columns. Criterion selection and the
// loss oracle share this so their tie handling is identical.
int argmin_with_tiebreak(const std::vector<double>& values,
                         const std::vector<ModelAlpha>& models, bool* tie_broken);

double default_correct_tol(const Vector& mu);

// A model is correct when the truth mu lies in the span of X(alpha):
// ||(I - P(alpha)) mu||^2 / n <= tol. Default tol scales with the signal size.
bool is_correct_model(const Matrix& x, const Vector& mu, const ModelAlpha& alpha,
                      double tol);
bool is_correct_model(const Matrix& x, const Vector& mu, const ModelAlpha& alpha);

}  // namespace cvsel
