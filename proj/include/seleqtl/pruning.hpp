#pragma once

#include "seleqtl/data_model.hpp"
#include "seleqtl/linalg.hpp"

#include <cstddef>
#include <vector>

namespace seleqtl {

// One agglomeration step. Clusters are labelled by their smallest member, so
// `a < b` and the merged cluster keeps label `a`.
struct Merge {
    std::size_t a;
    std::size_t b;
    double height;
};

// Minimax-linkage dendrogram cut at 1 - rho0.
//
// Distances are 1 - Pearson correlation, so strongly anti-correlated variants
// sit near distance 2 and never share a cluster.
struct ClusterTree {
    std::vector<Merge> merges;                   // full dendrogram, heights non-decreasing
    std::vector<std::vector<std::size_t>> clusters;  // partition at the cut, ordered by smallest member
    std::vector<std::size_t> prototypes;         // prototypes[c] is a member of clusters[c]
    std::vector<std::size_t> cluster_of;         // variant -> cluster id
    double rho0 = 0.5;

    std::size_t cluster_count() const { return clusters.size(); }
};

struct PrunedPanel {
    GenePanel panel;                        // prototype columns in original index order
    ClusterTree tree;
    std::vector<std::size_t> columns;       // pruned column -> original variant index
    std::vector<std::size_t> column_cluster;  // pruned column -> cluster id
};

inline constexpr double kDefaultRho0 = 0.5;

// d(i, j) = 1 - X_i^T X_j for standardized X; symmetric with zero diagonal.
Matrix correlation_distance(const Matrix& X);

// max_{j in members} D(i, j)
double minimax_radius_from(const Matrix& D, std::size_t i, const std::vector<std::size_t>& members);

// Minimax center of `members`; ties go to the lowest index.
std::size_t minimax_prototype(const Matrix& D, const std::vector<std::size_t>& members);

// Agglomerative clustering under minimax linkage, partition taken at
// `cut_height`. Ties between equal linkages go to the pair with the lowest
// labels; ties between prototype candidates to the lowest variant index.
ClusterTree minimax_cluster(const Matrix& D, double cut_height);

PrunedPanel prune(const GenePanel& panel, double rho0 = kDefaultRho0);

// Smallest correlation between any variant and its cluster prototype.
double min_prototype_correlation(const Matrix& X, const ClusterTree& tree);

} // namespace seleqtl
