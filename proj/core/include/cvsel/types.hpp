#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace cvsel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Row/column index lists at API boundaries are 1-based, matching how models
// and training samples are written in configs and reports.
using IndexList = std::vector<int>;

enum class Variant { known_sigma, unknown_sigma };

}  // namespace cvsel
