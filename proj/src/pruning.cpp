#include "seleqtl/pruning.hpp"

#include "seleqtl/error.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace seleqtl {

Matrix correlation_distance(const Matrix& X) {
    Matrix D = (Matrix::Ones(X.cols(), X.cols()) - X.transpose() * X).cwiseMax(0.0).cwiseMin(2.0);
    D = 0.5 * (D + D.transpose()).eval();
    D.diagonal().setZero();
    return D;
}

double minimax_radius_from(const Matrix& D, std::size_t i, const std::vector<std::size_t>& members) {
    double r = 0.0;
    for (std::size_t j : members) r = std::max(r, D(static_cast<Index>(i), static_cast<Index>(j)));
    return r;
}

std::size_t minimax_prototype(const Matrix& D, const std::vector<std::size_t>& members) {
    std::size_t best = members.front();
    double best_r = std::numeric_limits<double>::infinity();
    for (std::size_t i : members) {
        const double r = minimax_radius_from(D, i, members);
        if (r < best_r || (r == best_r && i < best)) {
            best_r = r;
            best = i;
        }
    }
    return best;
}

ClusterTree minimax_cluster(const Matrix& D, double cut_height) {
    const auto V = static_cast<std::size_t>(D.rows());
    if (D.cols() != D.rows()) throw Error(ErrorCode::InvalidArgument, "distance matrix must be square");
    if (!(cut_height > 0.0 && cut_height < 2.0)) throw Error(ErrorCode::InvalidArgument, "cut height must lie in (0, 2)");

    ClusterTree tree;
    tree.rho0 = 1.0 - cut_height;
    if (V == 0) return tree;

    // far(i, c): max distance from point i to members of cluster c (label c).
    Matrix far = D;
    // link(a, b): minimax radius of the union of clusters a and b.
    Matrix link = D;
    std::vector<std::vector<std::size_t>> members(V);
    for (std::size_t i = 0; i < V; ++i) members[i] = {i};
    std::vector<std::size_t> active(V);
    std::iota(active.begin(), active.end(), std::size_t{0});

    auto union_radius = [&](std::size_t a, std::size_t b) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto* side : {&members[a], &members[b]})
            for (std::size_t i : *side)
                best = std::min(best, std::max(far(static_cast<Index>(i), static_cast<Index>(a)),
                                               far(static_cast<Index>(i), static_cast<Index>(b))));
        return best;
    };

    while (active.size() > 1) {
        std::size_t best_a = 0, best_b = 0;
        double best = std::numeric_limits<double>::infinity();
        // `active` stays sorted, so the first strict minimum in scan order is the
        // lexicographically smallest label pair.
        for (std::size_t x = 0; x < active.size(); ++x) {
            for (std::size_t y = x + 1; y < active.size(); ++y) {
                const double h = link(static_cast<Index>(active[x]), static_cast<Index>(active[y]));
                if (h < best) {
                    best = h;
                    best_a = active[x];
                    best_b = active[y];
                }
            }
        }
        tree.merges.push_back({best_a, best_b, best});

        const auto ia = static_cast<Index>(best_a);
        const auto ib = static_cast<Index>(best_b);
        far.col(ia) = far.col(ia).cwiseMax(far.col(ib));
        members[best_a].insert(members[best_a].end(), members[best_b].begin(), members[best_b].end());
        std::sort(members[best_a].begin(), members[best_a].end());
        members[best_b].clear();
        active.erase(std::find(active.begin(), active.end(), best_b));

        for (std::size_t k : active) {
            if (k == best_a) continue;
            const double r = union_radius(best_a, k);
            link(ia, static_cast<Index>(k)) = r;
            link(static_cast<Index>(k), ia) = r;
        }
    }

    // Replay the dendrogram prefix below the cut. Minimax linkage has no
    // inversions, so the prefix is exactly the set of merges at or below it.
    std::vector<std::vector<std::size_t>> parts(V);
    for (std::size_t i = 0; i < V; ++i) parts[i] = {i};
    for (const Merge& m : tree.merges) {
        if (m.height > cut_height) break;
        parts[m.a].insert(parts[m.a].end(), parts[m.b].begin(), parts[m.b].end());
        std::sort(parts[m.a].begin(), parts[m.a].end());
        parts[m.b].clear();
    }
    tree.cluster_of.assign(V, 0);
    for (auto& p : parts) {
        if (p.empty()) continue;
        const std::size_t id = tree.clusters.size();
        for (std::size_t v : p) tree.cluster_of[v] = id;
        tree.prototypes.push_back(minimax_prototype(D, p));
        tree.clusters.push_back(std::move(p));
    }
    return tree;
}

PrunedPanel prune(const GenePanel& panel, double rho0) {
    if (!(rho0 > 0.0 && rho0 < 1.0)) throw Error(ErrorCode::InvalidArgument, "rho0 must lie in (0, 1)");
    PrunedPanel out;
    out.tree = minimax_cluster(correlation_distance(panel.X), 1.0 - rho0);

    std::vector<std::size_t> order(out.tree.prototypes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return out.tree.prototypes[a] < out.tree.prototypes[b]; });
    for (std::size_t c : order) {
        out.columns.push_back(out.tree.prototypes[c]);
        out.column_cluster.push_back(c);
    }

    out.panel.gene_id = panel.gene_id;
    out.panel.X = select_columns(panel.X, out.columns);
    out.panel.y = panel.y;
    for (std::size_t v : out.columns) out.panel.variant_ids.push_back(panel.variant_ids[v]);
    return out;
}

double min_prototype_correlation(const Matrix& X, const ClusterTree& tree) {
    double worst = 1.0;
    for (std::size_t c = 0; c < tree.clusters.size(); ++c) {
        const auto p = static_cast<Index>(tree.prototypes[c]);
        for (std::size_t m : tree.clusters[c])
            worst = std::min(worst, X.col(static_cast<Index>(m)).dot(X.col(p)));
    }
    return worst;
}

} // namespace seleqtl
