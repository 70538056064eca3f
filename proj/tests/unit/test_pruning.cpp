#include "seleqtl/error.hpp"
#include "seleqtl//data_model.hpp"
#include "seleqtl/pruning.hpp"

#include "../support/oracles.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace seleqtl;

namespace {

GenePanel panel_from(const Matrix& raw) {
    std::vector<std::string> ids;
    for (Index j = 0; j < raw.cols(); ++j) ids.push_back("v" + std::to_string(j));
    return make_panel("g", raw, Vector::Zero(raw.rows()), ids);
}

} // namespace

TEST_CASE("correlation distance") {
    Rng rng = make_stream(21, 0, StreamTag::Genotype);
    Matrix raw = testing::gaussian_matrix(40, 4, rng);
    raw.col(1) = raw.col(0);
    raw.col(2) = -raw.col(0);
    const Matrix X = standardize(raw);
    const Matrix D = correlation_distance(X);
    CHECK(D(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(D(0, 2) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(D(0, 3) == doctest::Approx(1.0 - oracle::pearson(raw.col(0), raw.col(3))).epsilon(1e-12));
    for (Index i = 0; i < 4; ++i) {
        CHECK(D(i, i) == 0.0);
        for (Index j = 0; j < 4; ++j) {
            CHECK(D(i, j) == D(j, i));
            CHECK(D(i, j) >= 0.0);
            CHECK(D(i, j) <= 2.0);
        }
    }
}

TEST_CASE("minimax clustering of a single variant") {
    const Matrix D = Matrix::Zero(1, 1);
    const ClusterTree t = minimax_cluster(D, 0.5);
    CHECK(t.cluster_count() == 1);
    CHECK(t.prototypes == std::vector<std::size_t>{0});
}

TEST_CASE("three-point example with a prototype tie") {
    Matrix D(3, 3);
    D << 0, 0.1, 0.9, 0.1, 0, 0.9, 0.9, 0.9, 0;
    const ClusterTree t = minimax_cluster(D, 0.5);
    REQUIRE(t.cluster_count() == 2);
    CHECK(t.clusters[0] == std::vector<std::size_t>{0, 1});
    CHECK(t.clusters[1] == std::vector<std::size_t>{2});
    CHECK(t.prototypes[0] == 0);
    CHECK(t.prototypes[1] == 2);
    CHECK(t.merges.size() == 2);
    CHECK(t.merges[0].height == doctest::Approx(0.1));
    CHECK(t.merges[1].height == doctest::Approx(0.9));
}

TEST_CASE("minimax clustering agrees with brute force on small instances") {
    Rng rng = make_stream(22, 0, StreamTag::Genotype);
    std::uniform_int_distribution<int> size(1, 8);
    for (int instance = 0; instance < 300; ++instance) {
        const int V = size(rng);
        Matrix raw = testing::gaussian_matrix(12, V, rng);
        // shared factors create clusters of varying tightness
        const Vector f = testing::gaussian_vector(12, rng);
        for (int j = 0; j < V; ++j) raw.col(j) += (j % 3) * f;
        const Matrix D = correlation_distance(standardize(raw));
        for (double cut : {0.3, 0.5, 0.9}) {
            const ClusterTree t = minimax_cluster(D, cut);
            const auto brute = oracle::minimax_brute_force(D, cut);
            CHECK(t.clusters == brute.clusters);
            CHECK(t.prototypes == brute.prototypes);
        }
    }
}

TEST_CASE("dendrogram heights are non-decreasing and cuts are monotone") {
    Rng rng = make_stream(23, 0, StreamTag::Genotype);
    GenotypeDesign d;
    d.variants = 80;
    const Matrix X = standardize(simulate_genotypes(d, rng));
    const Matrix D = correlation_distance(X);
    const ClusterTree t = minimax_cluster(D, 0.5);
    for (std::size_t k = 1; k < t.merges.size(); ++k) CHECK(t.merges[k].height >= t.merges[k - 1].height);
    std::size_t previous = static_cast<std::size_t>(X.cols()) + 1;
    for (double cut = 0.05; cut < 2.0; cut += 0.15) {
        const std::size_t count = minimax_cluster(D, cut).cluster_count();
        CHECK(count <= previous);
        previous = count;
    }
    const ClusterTree again = minimax_cluster(D, 0.5);
    CHECK(again.clusters == t.clusters);
    CHECK(again.prototypes == t.prototypes);
}

TEST_CASE("prune keeps prototypes within rho0 of every member") {
    Rng rng = make_stream(24, 0, StreamTag::Genotype);
    const Matrix raw = simulate_genotypes(GenotypeDesign{}, rng);
    const GenePanel panel = panel_from(raw);
    const PrunedPanel pruned = prune(panel, 0.5);
    CHECK(static_cast<std::size_t>(pruned.panel.variant_count()) == pruned.tree.cluster_count());
    CHECK(min_prototype_correlation(panel.X, pruned.tree) >= 0.5);
    for (std::size_t c = 0; c < pruned.tree.cluster_count(); ++c) {
        const std::size_t p = pruned.tree.prototypes[c];
        for (std::size_t m : pruned.tree.clusters[c])
            CHECK(oracle::pearson(raw.col(static_cast<Index>(m)), raw.col(static_cast<Index>(p))) >= 0.5 - 1e-12);
    }
    for (std::size_t k = 1; k < pruned.columns.size(); ++k) CHECK(pruned.columns[k] > pruned.columns[k - 1]);
    for (std::size_t k = 0; k < pruned.columns.size(); ++k) {
        CHECK(pruned.panel.X.col(static_cast<Index>(k)) == panel.X.col(static_cast<Index>(pruned.columns[k])));
        CHECK(pruned.tree.cluster_of[pruned.columns[k]] == pruned.column_cluster[k]);
    }
}

TEST_CASE("prune edge cases") {
    Rng rng = make_stream(25, 0, StreamTag::Genotype);
    SUBCASE("one variant correlated with all others gives one prototype") {
        const Vector f = testing::gaussian_vector(60, rng);
        Matrix raw(60, 5);
        for (int j = 0; j < 5; ++j) raw.col(j) = f + 0.2 * testing::gaussian_vector(60, rng);
        const PrunedPanel p = prune(panel_from(raw), 0.5);
        CHECK(p.tree.cluster_count() == 1);
    }
    SUBCASE("uncorrelated variants are all kept") {
        Matrix raw = Matrix::Zero(12, 6);
        for (int j = 0; j < 6; ++j) {
            raw(2 * j, j) = 1.0;
            raw(2 * j + 1, j) = -1.0;
        }
        const GenePanel panel = panel_from(raw);
        const PrunedPanel p = prune(panel, 0.5);
        CHECK(p.panel.variant_count() == 6);
        CHECK(p.panel.X == panel.X);
    }
}
