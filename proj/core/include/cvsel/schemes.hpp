#pragma once

#include <vector>

#include "cvsel/types.hpp"

namespace cvsel {

// How a disjoint partition lays its blocks over 1..n. Consecutive blocks are
// {1..t}, {t+1..2t}, ...; strided blocks are the residue classes
// {i, i+r, i+2r, ...}. Both are balanced coverage-1 partitions. On designs
// whose rows follow a sorted covariate, strided blocks keep every training
// sample representative of the whole covariate range.
enum class BlockLayout { consecutive, strided };

// r training samples of common size train_size over observations 1..n.
// Every index must appear in the same number of samples (the coverage).
struct TrainingScheme {
  int n = 0;
  int train_size = 0;
  int coverage = 0;
  std::vector<IndexList> samples;  // each sorted, 1-based

  int r() const { return static_cast<int>(samples.size()); }
  int validation_size() const { return n - train_size; }

  // Complement of samples[i] in 1..n, sorted (i is 0-based here).
  IndexList validation(int i) const;
};

struct SchemeValidation {
  bool sizes_equal = false;
  bool balanced = false;
  bool train_size_ok = false;
  bool indices_ok = false;
  int coverage = 0;

  bool ok() const { return sizes_equal && balanced && train_size_ok && indices_ok; }
};

// Partition of 1..n into r = n / train_size blocks. Requires train_size | n
// and 1 <= train_size < n.
TrainingScheme disjoint_scheme(int n, int train_size,
                               BlockLayout layout = BlockLayout::consecutive);

// Sample i = {((i-1)*train_size + j - 1) mod n + 1 : j = 1..train_size},
// i = 1..r, wrapping around. Balanced exactly when n divides r * train_size;
// coverage is then r * train_size / n.
TrainingScheme rotation_scheme(int n, int train_size, int r);

// Recomputes the scheme's claimed properties from its samples.
SchemeValidation validate_scheme(const TrainingScheme& scheme);

}  // namespace cvsel
