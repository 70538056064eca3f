#include "seleqtl/data_model.hpp"

#include "seleqtl/error.hpp"
#include "seleqtl/normal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace seleqtl {

namespace {

bool is_constant(const Eigen::Ref<const Vector>& col) {
    const double scale = std::max(1.0, col.cwiseAbs().maxCoeff());
    const double spread = (col.array() - col.mean()).matrix().norm();
    return spread <= 1e-12 * scale * std::sqrt(static_cast<double>(col.size()));
}

} // namespace

Matrix standardize(const Matrix& raw) {
    if (raw.rows() < 2) throw Error(ErrorCode::InvalidArgument, "standardize needs at least 2 samples");
    if (!raw.allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite genotype entry");
    Matrix out(raw.rows(), raw.cols());
    for (Index j = 0; j < raw.cols(); ++j) {
        if (is_constant(raw.col(j)))
            throw Error(ErrorCode::ConstantColumn, "column " + std::to_string(j) + " has zero variance");
        Vector c = raw.col(j).array() - raw.col(j).mean();
        out.col(j) = c / c.norm();
    }
    return out;
}

GenePanel make_panel(std::string gene_id, const Matrix& raw_genotypes, Vector y,
                     std::vector<std::string> variant_ids, std::vector<std::string>* dropped) {
    if (static_cast<Index>(variant_ids.size()) != raw_genotypes.cols())
        throw Error(ErrorCode::InvalidArgument, "variant id count does not match genotype columns");
    if (y.size() != raw_genotypes.rows())
        throw Error(ErrorCode::InvalidArgument, "expression length does not match sample count");
    if (!y.allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite expression value");

    std::vector<std::size_t> keep;
    for (Index j = 0; j < raw_genotypes.cols(); ++j) {
        if (is_constant(raw_genotypes.col(j))) {
            if (dropped) dropped->push_back(variant_ids[static_cast<std::size_t>(j)]);
        } else {
            keep.push_back(static_cast<std::size_t>(j));
        }
    }
    GenePanel panel;
    panel.gene_id = std::move(gene_id);
    panel.X = standardize(select_columns(raw_genotypes, keep));
    panel.y = std::move(y);
    panel.variant_ids.reserve(keep.size());
    for (std::size_t j : keep) panel.variant_ids.push_back(std::move(variant_ids[j]));
    return panel;
}

double standardization_error(const Matrix& X) {
    double err = 0.0;
    for (Index j = 0; j < X.cols(); ++j) {
        err = std::max(err, std::abs(X.col(j).mean()));
        err = std::max(err, std::abs(X.col(j).norm() - 1.0));
    }
    return err;
}

NoiseScale estimate_sigma_marginal(const Vector& x, const Vector& y) {
    const Index n = y.size();
    if (n < 3) throw Error(ErrorCode::InvalidArgument, "marginal noise estimate needs n >= 3");
    if (x.size() != n) throw Error(ErrorCode::InvalidArgument, "length mismatch");
    const double yy = y.squaredNorm();
    const double xy = x.dot(y);
    const double rss = yy - xy * xy;
    if (!(rss > 1e-12 * yy)) throw Error(ErrorCode::DegenerateResidual, "zero residual in marginal fit");
    return {std::sqrt(rss / static_cast<double>(n - 2)), NoiseSource::Marginal};
}

NoiseScale estimate_sigma_refit(const Matrix& XE, const Vector& y) {
    const Index n = y.size();
    const Index k = XE.cols();
    if (XE.rows() != n) throw Error(ErrorCode::InvalidArgument, "length mismatch");
    if (n <= k) throw Error(ErrorCode::InvalidArgument, "refit needs n > |E|");
    if (k == 0) return {y.norm() / std::sqrt(static_cast<double>(n)), NoiseSource::Refit};

    Eigen::JacobiSVD<Matrix> svd(XE, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues().minCoeff() < kRankTolerance)
        throw Error(ErrorCode::RankDeficient, "refit design is rank deficient");
    const Vector fitted = XE * svd.solve(y);
    const double rss = (y - fitted).squaredNorm();
    if (!(rss > 1e-12 * y.squaredNorm())) throw Error(ErrorCode::DegenerateResidual, "zero residual in refit");
    return {std::sqrt(rss / static_cast<double>(n - k)), NoiseSource::Refit};
}

std::vector<double> default_causal_count_distribution() {
    std::vector<double> dist(10, 1.0 / 27.0);
    dist[0] = 2.0 / 3.0;
    return dist;
}

SyntheticTruth sample_causal_structure(const std::vector<std::vector<std::size_t>>& clusters,
                                       std::span<const double> count_dist, double effect,
                                       Rng& rng) {
    if (count_dist.empty() || count_dist.size() > 10)
        throw Error(ErrorCode::InvalidArgument, "causal count distribution must cover a subset of 0..9");
    double total = 0.0;
    std::size_t max_count = 0;
    for (std::size_t k = 0; k < count_dist.size(); ++k) {
        if (count_dist[k] < 0.0) throw Error(ErrorCode::InvalidArgument, "negative probability");
        total += count_dist[k];
        if (count_dist[k] > 0.0) max_count = k;
    }
    if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorCode::InvalidArgument, "count distribution must sum to 1");
    if (clusters.size() < max_count)
        throw Error(ErrorCode::NotEnoughClusters, std::to_string(clusters.size()) + " clusters for up to " +
                                                     std::to_string(max_count) + " causal variants");

    // Inverse-CDF draw keeps the stream consumption fixed at one uniform.
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    std::size_t count = max_count;
    double acc = 0.0;
    for (std::size_t k = 0; k < count_dist.size(); ++k) {
        acc += count_dist[k];
        if (u < acc && count_dist[k] > 0.0) {
            count = k;
            break;
        }
    }

    std::vector<std::size_t> order(clusters.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    SyntheticTruth truth;
    for (std::size_t i = 0; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
        std::swap(order[i], order[pick(rng)]);
        const auto& members = clusters[order[i]];
        std::uniform_int_distribution<std::size_t> member(0, members.size() - 1);
        const std::size_t v = members[member(rng)];
        truth.causal_clusters.push_back(order[i]);
        truth.causal_indices.push_back(v);
        truth.effects[v] = effect;
    }
    std::sort(truth.causal_clusters.begin(), truth.causal_clusters.end());
    std::sort(truth.causal_indices.begin(), truth.causal_indices.end());
    return truth;
}

SyntheticExpression synthesize_expression(const Matrix& X, const SyntheticTruth& truth, Rng& rng,
                                          double noise_sd) {
    SyntheticExpression out;
    out.mu = Vector::Zero(X.rows());
    for (const auto& [k, beta] : truth.effects) {
        if (k >= static_cast<std::size_t>(X.cols()))
            throw Error(ErrorCode::InvalidArgument, "causal index out of range");
        out.mu += beta * X.col(static_cast<Index>(k));
    }
    std::normal_distribution<double> noise(0.0, 1.0);
    out.y = out.mu;
    for (Index i = 0; i < X.rows(); ++i) out.y[i] += noise_sd * noise(rng);
    return out;
}

Matrix simulate_genotypes(const GenotypeDesign& design, Rng& rng) {
    if (design.samples < 2 || design.variants < 1 || design.max_block < 1)
        throw Error(ErrorCode::InvalidArgument, "invalid genotype design");
    const Index n = design.samples;
    Matrix G(n, design.variants);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> block_size(1, design.max_block);

    int col = 0;
    while (col < design.variants) {
        const int size = std::min(block_size(rng), design.variants - col);
        const double r = design.min_block_correlation +
                         (design.max_block_correlation - design.min_block_correlation) * unif(rng);
        Vector factor(n);
        for (Index i = 0; i < n; ++i) factor[i] = gauss(rng);
        for (int b = 0; b < size; ++b, ++col) {
            const double maf = design.min_maf + (design.max_maf - design.min_maf) * unif(rng);
            const double cut_one = normal::upper_quantile(1.0 - (1.0 - maf) * (1.0 - maf));
            const double cut_two = normal::upper_quantile(maf * maf);
            for (int attempt = 0;; ++attempt) {
                for (Index i = 0; i < n; ++i) {
                    const double z = std::sqrt(r) * factor[i] + std::sqrt(1.0 - r) * gauss(rng);
                    G(i, col) = (z > cut_one ? 1.0 : 0.0) + (z > cut_two ? 1.0 : 0.0);
                }
                if (!is_constant(G.col(col)) || attempt >= 20) break;
            }
        }
    }
    return G;
}

} // namespace seleqtl
