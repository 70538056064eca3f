#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace seleqtl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Columns of `X` listed in `cols`, in that order.
Matrix select_columns(const Matrix& X, const std::vector<std::size_t>& cols);

// Smallest singular value of X below this marks a rank-deficient design.
inline constexpr double kRankTolerance = 1e-8;

} // namespace seleqtl
