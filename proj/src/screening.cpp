#include "seleqtl/screening.hpp"

#include "seleqtl/error.hpp"
#include "seleqtl/normal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace seleqtl {

double marginal_p_value(double t, double gamma) {
    return 2.0 * normal::sf(std::abs(t) / std::sqrt(1.0 + gamma * gamma));
}

ScreeningOutcome randomized_t(const GenePanel& panel, const NoiseScale& sigma, double gamma, Rng& rng) {
    std::vector<double> sigmas(static_cast<std::size_t>(panel.variant_count()), sigma.sigma);
    return randomized_t(panel, sigmas, gamma, rng);
}

ScreeningOutcome randomized_t(const GenePanel& panel, std::span<const double> sigmas, double gamma, Rng& rng) {
    const Index V = panel.variant_count();
    if (V == 0) throw Error(ErrorCode::InvalidArgument, "panel has no variants");
    if (!(gamma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be non-negative");
    if (static_cast<Index>(sigmas.size()) != V) throw Error(ErrorCode::InvalidArgument, "one noise scale per variant required");

    ScreeningOutcome out;
    out.gamma = gamma;
    out.omega = Vector::Zero(V);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (Index j = 0; j < V; ++j) out.omega[j] = gamma * noise(rng);

    const Vector xty = panel.X.transpose() * panel.y;
    out.T.resize(V);
    out.p.resize(V);
    for (Index j = 0; j < V; ++j) {
        const double s = sigmas[static_cast<std::size_t>(j)];
        if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorCode::InvalidArgument, "noise scale must be positive");
        out.T[j] = xty[j] / s + out.omega[j];
        out.p[j] = marginal_p_value(out.T[j], gamma);
    }

    Index j0 = 0;
    for (Index j = 1; j < V; ++j)
        if (std::abs(out.T[j]) > std::abs(out.T[j0])) j0 = j;
    out.j0 = static_cast<std::size_t>(j0);
    out.s_j0 = out.T[j0] >= 0.0 ? 1 : -1;
    out.sigma_j0 = sigmas[out.j0];
    out.T0 = 0.0;
    for (Index j = 0; j < V; ++j)
        if (j != j0) out.T0 = std::max(out.T0, std::abs(out.T[j]));

    out.p_tilde = bonferroni({out.p.data(), static_cast<std::size_t>(V)}, static_cast<std::size_t>(V));
    return out;
}

double bonferroni(std::span<const double> p, std::size_t variant_count) {
    if (p.empty()) return 1.0;
    const double pmin = *std::min_element(p.begin(), p.end());
    return std::min(1.0, static_cast<double>(variant_count) * pmin);
}

EGeneSelection bh_select(std::span<const double> p_tildes, std::span<const std::string> gene_ids, double q) {
    if (!(q > 0.0 && q < 1.0)) throw Error(ErrorCode::InvalidArgument, "q must lie in (0, 1)");
    if (p_tildes.size() != gene_ids.size()) throw Error(ErrorCode::InvalidArgument, "one gene id per p-value required");
    const std::size_t G = p_tildes.size();
    std::vector<std::size_t> order(G);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (p_tildes[a] != p_tildes[b]) return p_tildes[a] < p_tildes[b];
        return gene_ids[a] < gene_ids[b];
    });

    EGeneSelection sel;
    sel.q = q;
    sel.G = G;
    for (std::size_t k = G; k >= 1; --k) {
        if (p_tildes[order[k - 1]] <= static_cast<double>(k) * q / static_cast<double>(G)) {
            sel.K0 = k;
            break;
        }
    }
    sel.selected.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(sel.K0));
    return sel;
}

double theoretical_lambda(const Matrix& X, double sigma, Rng& rng, int draws) {
    if (draws < 1) throw Error(ErrorCode::InvalidArgument, "lambda needs at least one draw");
    if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be non-negative");
    std::normal_distribution<double> noise(0.0, 1.0);
    if (X.cols() == 0) return 0.0;
    Vector psi(X.rows());
    double total = 0.0;
    for (int d = 0; d < draws; ++d) {
        for (Index i = 0; i < psi.size(); ++i) psi[i] = sigma * noise(rng);
        total += (X.transpose() * psi).cwiseAbs().maxCoeff();
    }
    return total / static_cast<double>(draws);
}

} // namespace seleqtl
