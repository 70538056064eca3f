#pragma once

#include "seleqtl/linalg.hpp"
#include "seleqtl/rng.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace seleqtl {

// One gene's cis-window: standardized genotypes (centered, unit-norm columns)
// and the expression vector.
struct GenePanel {
    std::string gene_id;
    Matrix X;
    Vector y;
    std::vector<std::string> variant_ids;

    Index n() const { return X.rows(); }
    Index variant_count() const { return X.cols(); }
};

enum class NoiseSource { Known, Marginal, Refit };

struct NoiseScale {
    double sigma = 1.0;
    NoiseSource source = NoiseSource::Known;
};

struct SyntheticTruth {
    std::vector<std::size_t> causal_indices;   // sorted
    std::map<std::size_t, double> effects;     // keyed by causal index
    std::vector<std::size_t> causal_clusters;  // sorted cluster ids

    std::size_t causal_count() const { return causal_indices.size(); }
};

struct SyntheticExpression {
    Vector y;
    Vector mu;
};

// Centers every column and scales it to unit Euclidean norm.
// Throws ConstantColumn on a zero-variance column.
Matrix standardize(const Matrix& raw);

// Drops constant columns (reported through `dropped`), then standardizes.
GenePanel make_panel(std::string gene_id, const Matrix& raw_genotypes, Vector y,
                     std::vector<std::string> variant_ids,
                     std::vector<std::string>* dropped = nullptr);

// Max deviation of column means from 0 and column norms from 1.
double standardization_error(const Matrix& X);

// Residual scale of the simple regression of y on x_j (n - 2 degrees of freedom).
NoiseScale estimate_sigma_marginal(const Vector& x, const Vector& y);

// sqrt(RSS / (n - |E|)) after least squares of y on X_E.
NoiseScale estimate_sigma_refit(const Matrix& XE, const Vector& y);

// Probability 2/3 of no causal variant and 1/27 for each count in 1..9.
std::vector<double> default_causal_count_distribution();

inline constexpr double kDefaultEffectSize = 3.0;

// Draws |S| from `count_dist`, picks |S| distinct clusters uniformly and one
// uniformly chosen member of each as causal, all with effect `effect`.
SyntheticTruth sample_causal_structure(const std::vector<std::vector<std::size_t>>& clusters,
                                       std::span<const double> count_dist, double effect,
                                       Rng& rng);

// y = sum_k X_k beta_k + noise_sd * N(0, I).
SyntheticExpression synthesize_expression(const Matrix& X, const SyntheticTruth& truth,
                                          Rng& rng, double noise_sd = 1.0);

// Linkage-block genotype generator for simulation runs: latent Gaussian blocks
// thresholded to allele counts in {0, 1, 2} under Hardy-Weinberg proportions.
struct GenotypeDesign {
    int samples = 100;
    int variants = 300;
    int max_block = 4;
    double min_block_correlation = 0.75;
    double max_block_correlation = 0.98;
    double min_maf = 0.1;
    double max_maf = 0.5;
};

Matrix simulate_genotypes(const GenotypeDesign& design, Rng& rng);

} // namespace seleqtl
