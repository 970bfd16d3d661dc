#include "cvsel/model_space.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "cvsel/errors.hpp"

namespace cvsel {

namespace {

void validate_model(const ModelAlpha& alpha, int ambient_p) {
  if (alpha.columns.empty()) throw ModelSpaceError("model with no columns");
  int prev = 0;
  for (int c : alpha.columns) {
    if (c < 1 || c > ambient_p) {
      throw ModelSpaceError("column index " + std::to_string(c) +
                            " outside [1, " + std::to_string(ambient_p) + "]");
    }
    if (c <= prev) throw ModelSpaceError("model columns must be sorted and distinct");
    prev = c;
  }
}

// Number of nonempty subsets of {1..p} with size <= max, saturating at limit+1.
std::size_t count_subsets(int p, int max, std::size_t limit) {
  std::size_t total = 0;
  double binom = 1.0;
  for (int s = 1; s <= max; ++s) {
    binom = binom * static_cast<double>(p - s + 1) / static_cast<double>(s);
    if (binom > static_cast<double>(limit)) return limit + 1;
    total += static_cast<std::size_t>(binom + 0.5);
    if (total > limit) return limit + 1;
  }
  return total;
}

}  // namespace

ModelSpace enumerate_models(const SpaceSpec& spec) {
  if (spec.ambient_p < 1) throw ModelSpaceError("ambient column count must be >= 1");

  ModelSpace out;
  out.ambient_p = spec.ambient_p;

  switch (spec.kind) {
    case SpaceSpec::Kind::nested: {
      if (static_cast<std::size_t>(spec.ambient_p) > spec.cap) {
        throw ModelSpaceError("model space larger than cap");
      }
      ModelAlpha cur;
      for (int c = 1; c <= spec.ambient_p; ++c) {
        cur.columns.push_back(c);
        out.models.push_back(cur);
      }
      break;
    }
    case SpaceSpec::Kind::all_subsets: {
      const int p = spec.ambient_p;
      int max = spec.max_size > 0 ? spec.max_size : p;
      if (max > p) max = p;
      if (count_subsets(p, max, spec.cap) > spec.cap) {
        throw ModelSpaceError("model space larger than cap (" +
                              std::to_string(spec.cap) + ")");
      }
      // Size-major, lexicographic within size.
      for (int s = 1; s <= max; ++s) {
        IndexList comb(s);
        for (int i = 0; i < s; ++i) comb[i] = i + 1;
        while (true) {
          out.models.push_back(ModelAlpha{comb});
          int i = s - 1;
          while (i >= 0 && comb[i] == p - (s - 1 - i)) --i;
          if (i < 0) break;
          ++comb[i];
          for (int j = i + 1; j < s; ++j) comb[j] = comb[j - 1] + 1;
        }
      }
      break;
    }
    case SpaceSpec::Kind::explicit_list: {
      if (spec.models.empty()) throw ModelSpaceError("empty model space");
      if (spec.models.size() > spec.cap) throw ModelSpaceError("model space larger than cap");
      std::set<IndexList> seen;
      for (const ModelAlpha& m : spec.models) {
        validate_model(m, spec.ambient_p);
        if (!seen.insert(m.columns).second) {
          throw ModelSpaceError("duplicate model in explicit list");
        }
      }
      out.models = spec.models;
      break;
    }
  }
  return out;
}

Matrix submatrix(const Matrix& x, const ModelAlpha& alpha) {
  validate_model(alpha, static_cast<int>(x.cols()));
  Matrix out(x.rows(), alpha.dim());
  for (int j = 0; j < alpha.dim(); ++j) out.col(j) = x.col(alpha.columns[j] - 1);
  return out;
}

Matrix submatrix(const Matrix& x, const ModelAlpha& alpha, const IndexList& rows) {
  validate_model(alpha, static_cast<int>(x.cols()));
  Matrix out(static_cast<Index>(rows.size()), alpha.dim());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int r = rows[i];
    if (r < 1 || r > x.rows()) {
      throw DimensionError("row index " + std::to_string(r) + " outside [1, " +
                           std::to_string(x.rows()) + "]");
    }
    for (int j = 0; j < alpha.dim(); ++j) {
      out(static_cast<Index>(i), j) = x(r - 1, alpha.columns[j] - 1);
    }
  }
  return out;
}

int argmin_with_tiebreak(const std::vector<double>& values,
                         const std::vector<ModelAlpha>& models, bool* tie_broken) {
  if (values.empty() || values.size() != models.size()) {
    throw DimensionError("argmin needs matching nonempty values and models");
  }
  std::size_t best = 0;
  for (std::size_t j = 1; j < values.size(); ++j) {
    if (values[j] < values[best]) {
      best = j;
    } else if (values[j] == values[best]) {
      const ModelAlpha& a = models[j];
      const ModelAlpha& b = models[best];
      if (a.dim() < b.dim() || (a.dim() == b.dim() && a < b)) best = j;
    }
  }
  if (tie_broken != nullptr) {
    *tie_broken = false;
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (j != best && values[j] == values[best]) {
        *tie_broken = true;
        break;
      }
    }
  }
  return static_cast<int>(best);
}

double default_correct_tol(const Vector& mu) {
  const double n = static_cast<double>(mu.size());
  return 1e-10 * (mu.squaredNorm() / n + 1.0);
}

bool is_correct_model(const Matrix& x, const Vector& mu, const ModelAlpha& alpha,
                      double tol) {
  if (mu.size() != x.rows()) throw DimensionError("truth length does not match design rows");
  const ProjectionResult pr = project(submatrix(x, alpha), mu);
  return pr.residual.squaredNorm() / static_cast<double>(mu.size()) <= tol;
}

bool is_correct_model(const Matrix& x, const Vector& mu, const ModelAlpha& alpha) {
  return is_correct_model(x, mu, alpha, default_correct_tol(mu));
}

}  // namespace cvsel
