#include "seleqtl/linalg.hpp"

namespace seleqtl {

Matrix select_columns(const Matrix& X, const std::vector<std::size_t>& cols) {
    Matrix out(X.rows(), static_cast<Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k)) = X.col(static_cast<Index>(cols[k]));
    return out;
}

} // namespace seleqtl
