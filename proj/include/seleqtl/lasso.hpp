#pragma once

#include "seleqtl/linalg.hpp"
#include "seleqtl/rng.hpp"

#include <cstddef>
#include <vector>

namespace seleqtl {

// Minimizer of 1/2 ||y - X b||^2 - zeta^T b + lambda ||b||_1 + epsilon/2 ||b||^2
// together with the optimization variables of its stationarity conditions.
struct LassoSolution {
    Vector beta;
    std::vector<std::size_t> active;    // E, ascending
    std::vector<std::size_t> inactive;  // complement of E, ascending
    std::vector<int> signs;             // s_E
    Vector o_active;                    // beta restricted to E
    Vector o_inactive;                  // lambda-scaled subgradients, |.| <= lambda
    Vector zeta;
    double lambda = 0.0;
    double epsilon = 0.0;
    int sweeps = 0;
    double kkt_residual = 0.0;
    std::vector<double> objective_trace;  // objective after each sweep, when requested
};

struct LassoOptions {
    double tolerance = 1e-9;   // max absolute coefficient change per sweep
    int max_sweeps = 2000;
    double active_threshold = 1e-10;
    bool record_objective = false;
};

// Ridge weight 1 / sqrt(n).
double default_ridge(Index n);

Vector draw_lasso_randomization(Index p, double tau, Rng& rng);

double randomized_lasso_objective(const Matrix& X, const Vector& y, double lambda, double epsilon,
                                  const Vector& zeta, const Vector& beta);

// Cyclic coordinate descent, then an exact solve of the active-set
// stationarity system. Throws NoConvergence after `max_sweeps`.
LassoSolution randomized_lasso_solve(const Matrix& X, const Vector& y, double lambda, double epsilon,
                                     const Vector& zeta, const LassoOptions& options = {});

// Support, signs and subgradient variables implied by a given coefficient
// vector; used to rebuild a solution from a stored dump.
LassoSolution complete_lasso_solution(const Matrix& X, const Vector& y, double lambda, double epsilon,
                                      const Vector& zeta, const Vector& beta, double active_threshold = 1e-10);

} // namespace seleqtl
