#pragma once

#include "seleqtl/lasso.hpp"
#include "seleqtl/linalg.hpp"
#include "seleqtl/screening.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace seleqtl {

// Least-squares refit on the selected variants. `sigma[j]` is
// sqrt((X_E^T X_E)^{-1}_{jj}); the standard deviation of b_hat[j] is
// noise_sigma * sigma[j].
struct AdaptiveTarget {
    std::string gene_id;
    Vector b_hat;
    Vector sigma;
    Matrix gram_inverse;
    double noise_sigma = 1.0;

    std::size_t size() const { return static_cast<std::size_t>(b_hat.size()); }
    double estimate(std::size_t j) const { return b_hat[static_cast<Index>(j)]; }
    double scale(std::size_t j) const { return noise_sigma * sigma[static_cast<Index>(j)]; }
};

AdaptiveTarget adaptive_target(const Matrix& XE, const Vector& y, double noise_sigma = 1.0);

// (X_E^T X_E)^{-1} X_E^T mu: the population version of the refit.
Vector adaptive_truth(const Matrix& XE, const Vector& mu);

// max(sqrt(1 + gamma^2) * Phi^{-1}(1 - K0 q / (2 V_g G)), |T0|)
double egene_threshold(std::size_t K0, std::size_t variant_count, std::size_t gene_count, double q,
                       double gamma, double T0);

// omega_{j0} = (P b + q) / sigma + s_{j0} eta, with eta >= L.
//
// P and q are expressed for the unscaled inner product X_{j0}^T y; the
// division by the Stage-I noise scale restores the statistic's units.
struct EGeneKktMap {
    double P = 0.0;
    double q = 0.0;
    int s_j0 = 1;
    double L = 0.0;
    double gamma = 0.0;
    double sigma = 1.0;

    double omega(double b, double eta) const { return (P * b + q) / sigma + s_j0 * eta; }
    // log P(eta >= L | b_hat = t)
    double log_c1(double t) const;
};

// `x_j0` is the unpruned Stage-I column of the top variant.
EGeneKktMap build_egene_map(const Vector& x_j0, const Vector& y, const Matrix& XE,
                            const AdaptiveTarget& target, std::size_t j, const ScreeningOutcome& outcome,
                            double L);

double egene_reconstruction_residual(const EGeneKktMap& map, double b_hat_j, const ScreeningOutcome& outcome);

// zeta_E = A_E b + B_E o_E + c_E
// zeta_I = A_I b + B_I o_E + o_I + c_I
struct LassoKktMap {
    Vector A_E;
    Matrix B_E;
    Vector c_E;
    Vector A_I;
    Matrix B_I;
    Vector c_I;
    std::vector<int> s_E;
    double lambda = 0.0;
    double tau = 1.0;
    double epsilon = 0.0;

    std::size_t active_size() const { return s_E.size(); }
    std::size_t inactive_size() const { return static_cast<std::size_t>(A_I.size()); }
};

LassoKktMap build_lasso_map(const Matrix& X_pruned, const Vector& y, const LassoSolution& solution,
                            const AdaptiveTarget& target, std::size_t j, double tau);

struct LassoReconstruction {
    double active = 0.0;
    double inactive = 0.0;
};

LassoReconstruction lasso_reconstruction_residual(const LassoKktMap& map, double b_hat_j,
                                                  const LassoSolution& solution);

// eta >= L, sign(o_E) = s_E and |o_I| <= lambda at the observed values.
bool observed_constraints_hold(const EGeneKktMap& egene, const ScreeningOutcome& outcome,
                               const LassoSolution& solution);

} // namespace seleqtl
