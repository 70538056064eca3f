#pragma once

#include "seleqtl/data_model.hpp"
#include "seleqtl/linalg.hpp"
#include "seleqtl/rng.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace seleqtl {

// Stage-I outcome for one gene.
struct ScreeningOutcome {
    Vector T;          // perturbed statistics X_j^T y / sigma_j + omega_j
    Vector omega;      // N(0, gamma^2) perturbation
    Vector p;          // marginal two-sided p-values
    double p_tilde = 1.0;  // Bonferroni global p-value
    std::size_t j0 = 0;    // index of the largest |T|
    double T0 = 0.0;       // second largest |T|
    int s_j0 = 1;          // sign of T_{j0}
    double sigma_j0 = 1.0; // noise scale used for variant j0
    double gamma = 0.0;

    double T_j0() const { return T[static_cast<Index>(j0)]; }
    double omega_j0() const { return omega[static_cast<Index>(j0)]; }
};

struct EGeneSelection {
    std::vector<std::size_t> selected;  // gene positions, ordered by (p_tilde, gene id)
    std::size_t K0 = 0;
    double q = 0.1;
    std::size_t G = 0;
};

inline constexpr double kDefaultGamma2 = 0.5;
inline constexpr double kDefaultTau2 = 0.5;
inline constexpr double kDefaultFdrLevel = 0.1;
inline constexpr int kDefaultLambdaDraws = 500;

// 2 * (1 - Phi(|t| / sqrt(1 + gamma^2)))
double marginal_p_value(double t, double gamma);

ScreeningOutcome randomized_t(const GenePanel& panel, const NoiseScale& sigma, double gamma, Rng& rng);

// Per-variant noise scales, e.g. marginal estimates.
ScreeningOutcome randomized_t(const GenePanel& panel, std::span<const double> sigmas, double gamma, Rng& rng);

// min(1, V_g * min_j p_j)
double bonferroni(std::span<const double> p, std::size_t variant_count);

// Benjamini-Hochberg step-up on per-gene global p-values. Ties in p_tilde
// are ordered by gene id.
EGeneSelection bh_select(std::span<const double> p_tildes, std::span<const std::string> gene_ids, double q);

// Monte Carlo mean of ||X^T psi||_inf with psi ~ N(0, sigma^2 I).
double theoretical_lambda(const Matrix& X, double sigma, Rng& rng, int draws = kDefaultLambdaDraws);

} // namespace seleqtl
