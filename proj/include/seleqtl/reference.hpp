#pragma once

#include "seleqtl/linalg.hpp"
#include "seleqtl/selection_law.hpp"

#include <span>
#include <vector>

namespace seleqtl {

// Objective of the inner minimization in o_E at fixed t:
//   ||A_E t + B_E o + c_E||^2 / 2 tau^2 - log C2(o, t) + sum_k log(1 + 1 / (s_k o_k))
double inner_objective(const LassoKktMap& map, double t, const Vector& o);
Vector inner_gradient(const LassoKktMap& map, double t, const Vector& o);
Matrix inner_hessian(const LassoKktMap& map, double t, const Vector& o);

// log C2(o, t) = sum_k log(Phi((m_k + lambda) / tau) - Phi((m_k - lambda) / tau)),
// m = A_I t + B_I o + c_I.
double log_c2(const LassoKktMap& map, double t, const Vector& o);

bool sign_feasible(const LassoKktMap& map, const Vector& o);

struct InnerSolverOptions {
    int max_iterations = 500;
    double gradient_tolerance = 1e-8;
    double armijo = 1e-4;
    int max_backtracks = 80;
};

struct InnerSolution {
    Vector o;
    double objective = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
};

// Damped Newton with Armijo backtracking; iterates stay strictly inside the
// sign orthant. Throws InnerSolverFailure.
InnerSolution minimize_inner(const LassoKktMap& map, double t, const Vector& start,
                             const InnerSolverOptions& options = {});

// s_E * max(|beta_E|, 0.01)
Vector inner_start(const LassoKktMap& map, const Vector& beta_active);

double chernoff_log_reference(double t, const EGeneKktMap& em, const LassoKktMap& lm, const Vector& start);

// Evaluates the reference at sorted points, warm-starting outward from the
// point closest to `anchor`.
std::vector<double> chernoff_log_reference(std::span<const double> ts, double anchor, const EGeneKktMap& em,
                                           const LassoKktMap& lm, const Vector& start);

// log C1(t) + log of the sign-orthant integral, by adaptive Gauss-Kronrod.
// Supports |E| <= 2. `refined` doubles the Kronrod rule.
double quadrature_log_reference(double t, const EGeneKktMap& em, const LassoKktMap& lm, bool refined = false);

} // namespace seleqtl
