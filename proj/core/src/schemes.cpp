#include "cvsel/schemes.hpp"

#include <algorithm>
#include <string>

#include "cvsel/errors.hpp"

namespace cvsel {

IndexList TrainingScheme::validation(int i) const {
  const IndexList& s = samples.at(static_cast<std::size_t>(i));
  IndexList out;
  out.reserve(static_cast<std::size_t>(n - train_size));
  std::size_t pos = 0;
  for (int idx = 1; idx <= n; ++idx) {
    if (pos < s.size() && s[pos] == idx) {
      ++pos;
    } else {
      out.push_back(idx);
    }
  }
  return out;
}

namespace {

void check_train_size(int n, int train_size) {
  if (n < 2) throw SchemeError("need at least two observations");
  if (train_size < 1 || train_size >= n) {
    throw SchemeError("train_size " + std::to_string(train_size) +
                      " must lie in [1, " + std::to_string(n - 1) + "]");
  }
}

}  // namespace

TrainingScheme disjoint_scheme(int n, int train_size, BlockLayout layout) {
  check_train_size(n, train_size);
  if (n % train_size != 0) {
    throw SchemeError("train_size " + std::to_string(train_size) +
                      " does not divide n = " + std::to_string(n));
  }
  const int r = n / train_size;
  TrainingScheme out;
  out.n = n;
  out.train_size = train_size;
  out.coverage = 1;
  out.samples.resize(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) {
    IndexList& s = out.samples[static_cast<std::size_t>(i)];
    s.resize(static_cast<std::size_t>(train_size));
    for (int j = 0; j < train_size; ++j) {
      s[static_cast<std::size_t>(j)] =
          layout == BlockLayout::consecutive ? i * train_size + j + 1 : i + 1 + j * r;
    }
  }
  return out;
}

TrainingScheme rotation_scheme(int n, int train_size, int r) {
  check_train_size(n, train_size);
  if (r < 1) throw SchemeError("need at least one training sample");
  if ((static_cast<long long>(r) * train_size) % n != 0) {
    throw SchemeError("rotation with r = " + std::to_string(r) + ", train_size = " +
                      std::to_string(train_size) + " cannot cover n = " +
                      std::to_string(n) + " evenly; balance infeasible");
  }
  TrainingScheme out;
  out.n = n;
  out.train_size = train_size;
  out.coverage = static_cast<int>((static_cast<long long>(r) * train_size) / n);
  out.samples.resize(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) {
    IndexList& s = out.samples[static_cast<std::size_t>(i)];
    s.resize(static_cast<std::size_t>(train_size));
    for (int j = 0; j < train_size; ++j) {
      const long long start = static_cast<long long>(i) * train_size;
      s[static_cast<std::size_t>(j)] = static_cast<int>((start + j) % n) + 1;
    }
    std::sort(s.begin(), s.end());
  }
  return out;
}

SchemeValidation validate_scheme(const TrainingScheme& scheme) {
  SchemeValidation v;
  v.train_size_ok = scheme.n >= 2 && scheme.train_size >= 1 && scheme.train_size < scheme.n;

  v.sizes_equal = true;
  v.indices_ok = !scheme.samples.empty();
  std::vector<int> tally(static_cast<std::size_t>(scheme.n > 0 ? scheme.n : 0), 0);
  for (const IndexList& s : scheme.samples) {
    if (static_cast<int>(s.size()) != scheme.train_size) v.sizes_equal = false;
    IndexList sorted = s;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t j = 0; j < sorted.size(); ++j) {
      const int idx = sorted[j];
      if (idx < 1 || idx > scheme.n || (j > 0 && sorted[j - 1] == idx)) {
        v.indices_ok = false;
        continue;
      }
      ++tally[static_cast<std::size_t>(idx - 1)];
    }
  }
  if (!tally.empty()) {
    const auto [mn, mx] = std::minmax_element(tally.begin(), tally.end());
    v.balanced = (*mn == *mx) && *mn > 0;
    v.coverage = v.balanced ? *mn : 0;
  }
  return v;
}

}  // namespace cvsel
