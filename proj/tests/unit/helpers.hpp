#pragma once

#include "seleqtl/linalg.hpp"
#include "seleqtl/rng.hpp"

#include <random>

namespace testing {

inline seleqtl::Matrix gaussian_matrix(seleqtl::Index n, seleqtl::Index p, seleqtl::Rng& rng) {
    std::normal_distribution<double> z(0.0, 1.0);
    seleqtl::Matrix X(n, p);
    for (seleqtl::Index j = 0; j < p; ++j)
        for (seleqtl::Index i = 0; i < n; ++i) X(i, j) = z(rng);
    return X;
}

inline seleqtl::Vector gaussian_vector(seleqtl::Index n, seleqtl::Rng& rng) {
    std::normal_distribution<double> z(0.0, 1.0);
    seleqtl::Vector v(n);
    for (seleqtl::Index i = 0; i < n; ++i) v[i] = z(rng);
    return v;
}

} // namespace testing
