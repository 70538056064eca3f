#include "seleqtl/selection_law.hpp"

#include "seleqtl/error.hpp"
#include "seleqtl/normal.hpp"

#include <cmath>

namespace seleqtl {

AdaptiveTarget adaptive_target(const Matrix& XE, const Vector& y, double noise_sigma) {
    if (XE.cols() == 0) throw Error(ErrorCode::InvalidArgument, "empty selected set");
    if (XE.rows() <= XE.cols()) throw Error(ErrorCode::RankDeficient, "more selected variants than samples");
    Eigen::JacobiSVD<Matrix> svd(XE, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    if (s.minCoeff() < kRankTolerance) throw Error(ErrorCode::RankDeficient, "selected design is rank deficient");

    AdaptiveTarget t;
    t.noise_sigma = noise_sigma;
    const Matrix V = svd.matrixV();
    t.gram_inverse = V * s.cwiseInverse().cwiseAbs2().asDiagonal() * V.transpose();
    t.b_hat = V * (s.cwiseInverse().asDiagonal() * (svd.matrixU().transpose() * y));
    t.sigma = t.gram_inverse.diagonal().cwiseSqrt();
    return t;
}

Vector adaptive_truth(const Matrix& XE, const Vector& mu) {
    if (XE.cols() == 0) return Vector();
    return (XE.transpose() * XE).ldlt().solve(XE.transpose() * mu);
}

double egene_threshold(std::size_t K0, std::size_t variant_count, std::size_t gene_count, double q,
                       double gamma, double T0) {
    if (K0 < 1 || variant_count < 1 || gene_count < 1)
        throw Error(ErrorCode::InvalidQuantileArgument, "K0, V_g and G must be positive");
    const double tail = static_cast<double>(K0) * q /
                        (2.0 * static_cast<double>(variant_count) * static_cast<double>(gene_count));
    if (!(tail > 0.0 && tail < 0.5))
        throw Error(ErrorCode::InvalidQuantileArgument, "K0 q / (2 V_g G) must lie in (0, 1/2)");
    return std::max(std::sqrt(1.0 + gamma * gamma) * normal::upper_quantile(tail), std::abs(T0));
}

double EGeneKktMap::log_c1(double t) const {
    return normal::log_sf((L + s_j0 * (P * t + q) / sigma) / gamma);
}

EGeneKktMap build_egene_map(const Vector& x_j0, const Vector& y, const Matrix& XE,
                            const AdaptiveTarget& target, std::size_t j, const ScreeningOutcome& outcome,
                            double L) {
    if (j >= target.size()) throw Error(ErrorCode::InvalidArgument, "target coordinate out of range");
    const auto jj = static_cast<Index>(j);
    const double var_j = target.gram_inverse(jj, jj);
    // c_j: the direction in sample space whose inner product with y is b_hat_j.
    const Vector c = XE * target.gram_inverse.col(jj);

    EGeneKktMap map;
    map.P = -x_j0.dot(c) / var_j;
    map.q = -x_j0.dot(y - c * (target.b_hat[jj] / var_j));
    map.s_j0 = outcome.s_j0;
    map.L = L;
    map.gamma = outcome.gamma;
    map.sigma = outcome.sigma_j0;
    return map;
}

double egene_reconstruction_residual(const EGeneKktMap& map, double b_hat_j, const ScreeningOutcome& outcome) {
    const double eta = outcome.s_j0 * outcome.T_j0();
    return std::abs(outcome.omega_j0() - map.omega(b_hat_j, eta));
}

LassoKktMap build_lasso_map(const Matrix& X_pruned, const Vector& y, const LassoSolution& solution,
                            const AdaptiveTarget& target, std::size_t j, double tau) {
    const auto kE = static_cast<Index>(solution.active.size());
    if (kE == 0 || static_cast<std::size_t>(kE) != target.size())
        throw Error(ErrorCode::InvalidArgument, "target does not match the active set");
    if (j >= target.size()) throw Error(ErrorCode::InvalidArgument, "target coordinate out of range");
    const auto jj = static_cast<Index>(j);

    const Matrix XE = select_columns(X_pruned, solution.active);
    const Matrix XI = select_columns(X_pruned, solution.inactive);
    const Matrix gram = XE.transpose() * XE;
    const Matrix cross = XI.transpose() * XE;
    const Vector v = target.gram_inverse.col(jj);
    const double var_j = v[jj];

    LassoKktMap map;
    map.lambda = solution.lambda;
    map.tau = tau;
    map.epsilon = solution.epsilon;
    map.s_E = solution.signs;

    map.A_E = -(gram * v) / var_j;
    map.A_I = -(cross * v) / var_j;
    map.B_E = gram;
    map.B_E.diagonal().array() += solution.epsilon;
    map.B_I = cross;

    // Null statistic: the data vector (b_hat_E, X_I^T (y - X_E b_hat_E)) minus
    // its regression on b_hat_j, pushed through the data block of the map.
    const Vector data_active = target.b_hat - v * (target.b_hat[jj] / var_j);
    const Vector data_inactive = XI.transpose() * (y - XE * target.b_hat);
    map.c_E = -(gram * data_active);
    for (Index k = 0; k < kE; ++k) map.c_E[k] += solution.lambda * solution.signs[static_cast<std::size_t>(k)];
    map.c_I = -(cross * data_active) - data_inactive;
    return map;
}

LassoReconstruction lasso_reconstruction_residual(const LassoKktMap& map, double b_hat_j,
                                                  const LassoSolution& solution) {
    LassoReconstruction r;
    Vector zeta_E(static_cast<Index>(solution.active.size()));
    for (std::size_t k = 0; k < solution.active.size(); ++k)
        zeta_E[static_cast<Index>(k)] = solution.zeta[static_cast<Index>(solution.active[k])];
    r.active = (zeta_E - (map.A_E * b_hat_j + map.B_E * solution.o_active + map.c_E)).cwiseAbs().maxCoeff();
    if (!solution.inactive.empty()) {
        Vector zeta_I(static_cast<Index>(solution.inactive.size()));
        for (std::size_t k = 0; k < solution.inactive.size(); ++k)
            zeta_I[static_cast<Index>(k)] = solution.zeta[static_cast<Index>(solution.inactive[k])];
        r.inactive = (zeta_I - (map.A_I * b_hat_j + map.B_I * solution.o_active + solution.o_inactive + map.c_I))
                         .cwiseAbs()
                         .maxCoeff();
    }
    return r;
}

bool observed_constraints_hold(const EGeneKktMap& egene, const ScreeningOutcome& outcome,
                               const LassoSolution& solution) {
    if (outcome.s_j0 * outcome.T_j0() < egene.L) return false;
    for (std::size_t k = 0; k < solution.active.size(); ++k)
        if ((solution.o_active[static_cast<Index>(k)] > 0.0 ? 1 : -1) != solution.signs[k]) return false;
    for (Index k = 0; k < solution.o_inactive.size(); ++k)
        if (std::abs(solution.o_inactive[k]) > solution.lambda) return false;
    return true;
}

} // namespace seleqtl
