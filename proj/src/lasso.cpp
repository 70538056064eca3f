#include "seleqtl/lasso.hpp"

#include "seleqtl/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace seleqtl {

namespace {

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

struct Partition {
    std::vector<std::size_t> active;
    std::vector<std::size_t> inactive;
    std::vector<int> signs;
};

Partition partition(const Vector& beta, double threshold) {
    Partition p;
    for (Index j = 0; j < beta.size(); ++j) {
        if (std::abs(beta[j]) > threshold) {
            p.active.push_back(static_cast<std::size_t>(j));
            p.signs.push_back(beta[j] > 0.0 ? 1 : -1);
        } else {
            p.inactive.push_back(static_cast<std::size_t>(j));
        }
    }
    return p;
}

} // namespace

double default_ridge(Index n) { return 1.0 / std::sqrt(static_cast<double>(n)); }

Vector draw_lasso_randomization(Index p, double tau, Rng& rng) {
    std::normal_distribution<double> noise(0.0, 1.0);
    Vector z(p);
    for (Index j = 0; j < p; ++j) z[j] = tau * noise(rng);
    return z;
}

double randomized_lasso_objective(const Matrix& X, const Vector& y, double lambda, double epsilon,
                                  const Vector& zeta, const Vector& beta) {
    return 0.5 * (y - X * beta).squaredNorm() - zeta.dot(beta) + lambda * beta.lpNorm<1>() +
           0.5 * epsilon * beta.squaredNorm();
}

LassoSolution randomized_lasso_solve(const Matrix& X, const Vector& y, double lambda, double epsilon,
                                     const Vector& zeta, const LassoOptions& options) {
    const Index p = X.cols();
    if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
    if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
    if (p == 0) throw Error(ErrorCode::InvalidArgument, "design has no columns");
    if (zeta.size() != p || y.size() != X.rows()) throw Error(ErrorCode::InvalidArgument, "dimension mismatch");

    LassoSolution sol;
    sol.lambda = lambda;
    sol.epsilon = epsilon;
    sol.zeta = zeta;
    sol.beta = Vector::Zero(p);

    const Vector col_sq = X.colwise().squaredNorm().transpose();
    Vector resid = y;
    bool converged = false;
    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (Index j = 0; j < p; ++j) {
            const double old = sol.beta[j];
            const double z = X.col(j).dot(resid) + col_sq[j] * old + zeta[j];
            const double updated = soft_threshold(z, lambda) / (col_sq[j] + epsilon);
            if (updated != old) {
                resid.noalias() -= (updated - old) * X.col(j);
                sol.beta[j] = updated;
                max_change = std::max(max_change, std::abs(updated - old));
            }
        }
        sol.sweeps = sweep + 1;
        if (options.record_objective)
            sol.objective_trace.push_back(randomized_lasso_objective(X, y, lambda, epsilon, zeta, sol.beta));
        if (max_change <= options.tolerance) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw Error(ErrorCode::NoConvergence, "coordinate descent did not converge in " +
                                                  std::to_string(options.max_sweeps) + " sweeps");

    // The support is settled; solve the active stationarity system exactly.
    Partition part = partition(sol.beta, options.active_threshold);
    if (!part.active.empty()) {
        const Matrix XE = select_columns(X, part.active);
        Vector rhs(static_cast<Index>(part.active.size()));
        for (std::size_t k = 0; k < part.active.size(); ++k)
            rhs[static_cast<Index>(k)] = zeta[static_cast<Index>(part.active[k])] - lambda * part.signs[k];
        rhs += XE.transpose() * y;
        Matrix H = XE.transpose() * XE;
        H.diagonal().array() += epsilon;
        const Vector bE = H.ldlt().solve(rhs);

        Vector candidate = Vector::Zero(p);
        bool consistent = true;
        for (std::size_t k = 0; k < part.active.size(); ++k) {
            const double b = bE[static_cast<Index>(k)];
            if (!(std::abs(b) > options.active_threshold) || (b > 0.0 ? 1 : -1) != part.signs[k]) consistent = false;
            candidate[static_cast<Index>(part.active[k])] = b;
        }
        if (consistent) {
            const Vector corr = X.transpose() * (y - X * candidate) + zeta;
            for (std::size_t j : part.inactive)
                if (std::abs(corr[static_cast<Index>(j)]) > lambda * (1.0 + 1e-9)) consistent = false;
        }
        if (consistent) sol.beta = candidate;
    }

    LassoSolution done = complete_lasso_solution(X, y, lambda, epsilon, zeta, sol.beta, options.active_threshold);
    done.sweeps = sol.sweeps;
    done.objective_trace = std::move(sol.objective_trace);
    return done;
}

LassoSolution complete_lasso_solution(const Matrix& X, const Vector& y, double lambda, double epsilon,
                                      const Vector& zeta, const Vector& beta, double active_threshold) {
    const Index p = X.cols();
    if (beta.size() != p || zeta.size() != p) throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
    LassoSolution sol;
    sol.lambda = lambda;
    sol.epsilon = epsilon;
    sol.zeta = zeta;
    sol.beta = beta;
    Partition part = partition(sol.beta, active_threshold);
    for (std::size_t j : part.inactive) sol.beta[static_cast<Index>(j)] = 0.0;
    sol.active = std::move(part.active);
    sol.inactive = std::move(part.inactive);
    sol.signs = std::move(part.signs);

    const Vector corr = X.transpose() * (y - X * sol.beta) + zeta;
    sol.o_active.resize(static_cast<Index>(sol.active.size()));
    for (std::size_t k = 0; k < sol.active.size(); ++k)
        sol.o_active[static_cast<Index>(k)] = sol.beta[static_cast<Index>(sol.active[k])];
    sol.o_inactive.resize(static_cast<Index>(sol.inactive.size()));
    for (std::size_t k = 0; k < sol.inactive.size(); ++k)
        sol.o_inactive[static_cast<Index>(k)] = std::clamp(corr[static_cast<Index>(sol.inactive[k])], -lambda, lambda);

    // Stationarity: X^T(X b - y) - zeta + lambda u + epsilon b = 0.
    Vector u = Vector::Zero(p);
    for (std::size_t k = 0; k < sol.active.size(); ++k) u[static_cast<Index>(sol.active[k])] = sol.signs[k];
    for (std::size_t k = 0; k < sol.inactive.size(); ++k)
        u[static_cast<Index>(sol.inactive[k])] = sol.o_inactive[static_cast<Index>(k)] / lambda;
    sol.kkt_residual = (-corr + lambda * u + epsilon * sol.beta).cwiseAbs().maxCoeff();
    return sol;
}

} // namespace seleqtl
