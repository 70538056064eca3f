#include "seleqtl/reference.hpp"

#include "seleqtl/error.hpp"
#include "seleqtl/normal.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace seleqtl {

namespace {

Vector inactive_means(const LassoKktMap& map, double t, const Vector& o) {
    return map.A_I * t + map.B_I * o + map.c_I;
}

} // namespace

double log_c2(const LassoKktMap& map, double t, const Vector& o) {
    if (map.A_I.size() == 0) return 0.0;
    const Vector m = inactive_means(map, t, o);
    double total = 0.0;
    for (Index k = 0; k < m.size(); ++k)
        total += normal::log_interval((m[k] - map.lambda) / map.tau, (m[k] + map.lambda) / map.tau);
    return total;
}

bool sign_feasible(const LassoKktMap& map, const Vector& o) {
    for (Index k = 0; k < o.size(); ++k)
        if (!(map.s_E[static_cast<std::size_t>(k)] * o[k] > 0.0)) return false;
    return true;
}

double inner_objective(const LassoKktMap& map, double t, const Vector& o) {
    if (!sign_feasible(map, o)) return std::numeric_limits<double>::infinity();
    const Vector r = map.A_E * t + map.B_E * o + map.c_E;
    double value = r.squaredNorm() / (2.0 * map.tau * map.tau) - log_c2(map, t, o);
    for (Index k = 0; k < o.size(); ++k) value += std::log1p(1.0 / (map.s_E[static_cast<std::size_t>(k)] * o[k]));
    return value;
}

Vector inner_gradient(const LassoKktMap& map, double t, const Vector& o) {
    const double tau2 = map.tau * map.tau;
    const Vector r = map.A_E * t + map.B_E * o + map.c_E;
    Vector g = map.B_E.transpose() * r / tau2;
    if (map.A_I.size() > 0) {
        const Vector m = inactive_means(map, t, o);
        Vector d1(m.size());
        for (Index k = 0; k < m.size(); ++k) d1[k] = normal::log_interval_derivs(m[k], map.lambda, map.tau).d1;
        g -= map.B_I.transpose() * d1;
    }
    for (Index k = 0; k < o.size(); ++k) {
        const double s = map.s_E[static_cast<std::size_t>(k)];
        const double x = s * o[k];
        g[k] -= s / (x * (x + 1.0));
    }
    return g;
}

Matrix inner_hessian(const LassoKktMap& map, double t, const Vector& o) {
    const double tau2 = map.tau * map.tau;
    Matrix H = map.B_E.transpose() * map.B_E / tau2;
    if (map.A_I.size() > 0) {
        const Vector m = inactive_means(map, t, o);
        Vector w(m.size());
        for (Index k = 0; k < m.size(); ++k) w[k] = -normal::log_interval_derivs(m[k], map.lambda, map.tau).d2;
        H += map.B_I.transpose() * w.asDiagonal() * map.B_I;
    }
    for (Index k = 0; k < o.size(); ++k) {
        const double x = map.s_E[static_cast<std::size_t>(k)] * o[k];
        H(k, k) += (2.0 * x + 1.0) / (x * x * (x + 1.0) * (x + 1.0));
    }
    return H;
}

Vector inner_start(const LassoKktMap& map, const Vector& beta_active) {
    Vector o(beta_active.size());
    for (Index k = 0; k < o.size(); ++k)
        o[k] = map.s_E[static_cast<std::size_t>(k)] * std::max(std::abs(beta_active[k]), 0.01);
    return o;
}

InnerSolution minimize_inner(const LassoKktMap& map, double t, const Vector& start,
                             const InnerSolverOptions& options) {
    if (!sign_feasible(map, start)) throw Error(ErrorCode::InnerSolverFailure, "infeasible starting point");
    InnerSolution sol;
    sol.o = start;
    sol.objective = inner_objective(map, t, sol.o);
    for (sol.iterations = 0; sol.iterations < options.max_iterations; ++sol.iterations) {
        const Vector g = inner_gradient(map, t, sol.o);
        sol.gradient_norm = g.norm();
        if (sol.gradient_norm <= options.gradient_tolerance) return sol;

        const Matrix H = inner_hessian(map, t, sol.o);
        Eigen::LLT<Matrix> llt(H);
        Vector d = llt.info() == Eigen::Success ? Vector(-llt.solve(g)) : Vector(-g);
        double slope = g.dot(d);
        if (!(slope < 0.0)) {
            d = -g;
            slope = -g.squaredNorm();
        }
        if (-slope < 1e-28) return sol;

        // Below objective rounding: accept feasible Newton steps as they come.
        const bool local = -slope < 1e-10 * (1.0 + std::abs(sol.objective));
        double step = 1.0;
        bool accepted = false;
        for (int b = 0; b < options.max_backtracks; ++b, step *= 0.5) {
            const Vector trial = sol.o + step * d;
            if (!sign_feasible(map, trial)) continue;
            const double f = inner_objective(map, t, trial);
            if (local || f <= sol.objective + options.armijo * step * slope) {
                sol.o = trial;
                sol.objective = f;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (sol.gradient_norm <= 1e3 * options.gradient_tolerance) return sol;
            throw Error(ErrorCode::InnerSolverFailure, "line search found no descent step");
        }
    }
    sol.gradient_norm = inner_gradient(map, t, sol.o).norm();
    if (sol.gradient_norm <= options.gradient_tolerance) return sol;
    throw Error(ErrorCode::InnerSolverFailure, "iteration limit reached");
}

double chernoff_log_reference(double t, const EGeneKktMap& em, const LassoKktMap& lm, const Vector& start) {
    return em.log_c1(t) - minimize_inner(lm, t, start).objective;
}

std::vector<double> chernoff_log_reference(std::span<const double> ts, double anchor, const EGeneKktMap& em,
                                           const LassoKktMap& lm, const Vector& start) {
    std::vector<double> out(ts.size());
    if (ts.empty()) return out;
    std::size_t centre = 0;
    for (std::size_t i = 1; i < ts.size(); ++i)
        if (std::abs(ts[i] - anchor) < std::abs(ts[centre] - anchor)) centre = i;

    const InnerSolution first = minimize_inner(lm, ts[centre], start);
    out[centre] = em.log_c1(ts[centre]) - first.objective;
    Vector warm = first.o;
    for (std::size_t i = centre + 1; i < ts.size(); ++i) {
        const InnerSolution s = minimize_inner(lm, ts[i], warm);
        out[i] = em.log_c1(ts[i]) - s.objective;
        warm = s.o;
    }
    warm = first.o;
    for (std::size_t i = centre; i-- > 0;) {
        const InnerSolution s = minimize_inner(lm, ts[i], warm);
        out[i] = em.log_c1(ts[i]) - s.objective;
        warm = s.o;
    }
    return out;
}

namespace {

// Log integrand in the orthant coordinates u = s_E * o >= 0.
struct OrthantIntegrand {
    const LassoKktMap& map;
    double t;
    Vector base;  // A_E t + c_E

    Vector to_o(const Vector& u) const {
        Vector o(u.size());
        for (Index k = 0; k < u.size(); ++k) o[k] = map.s_E[static_cast<std::size_t>(k)] * u[k];
        return o;
    }

    double operator()(const Vector& u) const {
        const Vector o = to_o(u);
        const Vector r = base + map.B_E * o;
        return -r.squaredNorm() / (2.0 * map.tau * map.tau) + log_c2(map, t, o);
    }

    // Partial derivatives in u of the concave log integrand.
    void derivs(const Vector& u, Index k, double& d1, double& d2) const {
        const Vector o = to_o(u);
        const double s = map.s_E[static_cast<std::size_t>(k)];
        const double tau2 = map.tau * map.tau;
        const Vector r = base + map.B_E * o;
        d1 = -s * map.B_E.col(k).dot(r) / tau2;
        d2 = -map.B_E.col(k).squaredNorm() / tau2;
        if (map.A_I.size() > 0) {
            const Vector m = map.A_I * t + map.B_I * o + map.c_I;
            for (Index i = 0; i < m.size(); ++i) {
                const auto li = normal::log_interval_derivs(m[i], map.lambda, map.tau);
                d1 += s * map.B_I(i, k) * li.d1;
                d2 += map.B_I(i, k) * map.B_I(i, k) * li.d2;
            }
        }
    }
};

// Coordinate ascent with safeguarded 1-D Newton on each coordinate, clamped
// at the orthant boundary.
Vector orthant_maximizer(const OrthantIntegrand& h, Index dim) {
    Vector u = Vector::Zero(dim);
    for (int sweep = 0; sweep < 500; ++sweep) {
        double moved = 0.0;
        for (Index k = 0; k < dim; ++k) {
            double lo = 0.0;
            double hi = std::numeric_limits<double>::infinity();
            for (int it = 0; it < 200; ++it) {
                double d1 = 0.0, d2 = 0.0;
                h.derivs(u, k, d1, d2);
                if (d1 > 0.0) lo = u[k]; else hi = u[k];
                if (u[k] == 0.0 && d1 <= 0.0) break;
                if (std::abs(d1) <= 1e-12 * (1.0 + std::abs(u[k]) * std::sqrt(-d2))) break;
                double next = u[k] - d1 / d2;
                if (!(next > lo && next < hi)) next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * lo + 1.0;
                next = std::max(next, 0.0);
                if (std::abs(next - u[k]) <= 1e-15 * (1.0 + std::abs(u[k]))) {
                    u[k] = next;
                    break;
                }
                moved = std::max(moved, std::abs(next - u[k]));
                u[k] = next;
            }
        }
        if (moved <= 1e-12) break;
    }
    return u;
}

constexpr unsigned kMaxDepth = 20;
constexpr double kRelTolerance = 1e-12;
constexpr double kTailExponent = 60.0;

template <unsigned Points>
double orthant_integral(const OrthantIntegrand& h, Index dim, const Vector& u_star, double h_star, double width) {
    using Kronrod = boost::math::quadrature::gauss_kronrod<double, Points>;
    auto lower = [&](Index k) { return std::max(0.0, u_star[k] - width); };
    auto upper = [&](Index k) { return u_star[k] + width; };
    if (dim == 1) {
        auto f = [&](double u) {
            Vector v(1);
            v[0] = u;
            return std::exp(h(v) - h_star);
        };
        return Kronrod::integrate(f, lower(0), upper(0), kMaxDepth, kRelTolerance);
    }
    auto outer = [&](double u0) {
        auto inner = [&](double u1) {
            Vector v(2);
            v << u0, u1;
            return std::exp(h(v) - h_star);
        };
        return Kronrod::integrate(inner, lower(1), upper(1), kMaxDepth, kRelTolerance);
    };
    return Kronrod::integrate(outer, lower(0), upper(0), kMaxDepth, kRelTolerance);
}

} // namespace

double quadrature_log_reference(double t, const EGeneKktMap& em, const LassoKktMap& lm, bool refined) {
    const Index dim = static_cast<Index>(lm.active_size());
    if (dim > 2) throw Error(ErrorCode::OracleScopeExceeded, "quadrature oracle supports at most two active variants");
    if (dim == 0) throw Error(ErrorCode::InvalidArgument, "empty active set");

    OrthantIntegrand h{lm, t, lm.A_E * t + lm.c_E};
    const Vector u_star = orthant_maximizer(h, dim);
    const double h_star = h(u_star);

    // The log integrand is at least this curved, so beyond `width` it sits
    // kTailExponent below its maximum.
    Eigen::SelfAdjointEigenSolver<Matrix> eig(lm.B_E.transpose() * lm.B_E);
    const double kappa = eig.eigenvalues().minCoeff() / (lm.tau * lm.tau);
    const double width = std::sqrt(2.0 * kTailExponent / kappa);

    const double integral = refined ? orthant_integral<61>(h, dim, u_star, h_star, width)
                                    : orthant_integral<31>(h, dim, u_star, h_star, width);
    return em.log_c1(t) + h_star + std::log(integral);
}

} // namespace seleqtl
