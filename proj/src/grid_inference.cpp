#include "seleqtl/grid_inference.hpp"

#include "seleqtl/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace seleqtl {

std::string_view to_string(ReferenceKind kind) {
    switch (kind) {
    case ReferenceKind::Chernoff: return "chernoff";
    case ReferenceKind::Quadrature: return "quadrature";
    case ReferenceKind::Constant: return "constant";
    }
    return "unknown";
}

std::vector<double> build_grid(double b_hat, double scale, const GridOptions& options) {
    if (!(scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid scale must be positive");
    if (options.points < 3 || options.points % 2 == 0)
        throw Error(ErrorCode::InvalidArgument, "grid needs an odd number of at least 3 points");
    if (!(options.half_width > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid half-width must be positive");
    const auto half = static_cast<long>(options.points / 2);
    const double step = options.half_width * scale / static_cast<double>(half);
    std::vector<double> pts(options.points);
    for (long i = -half; i <= half; ++i) pts[static_cast<std::size_t>(i + half)] = b_hat + static_cast<double>(i) * step;
    pts[static_cast<std::size_t>(half)] = b_hat;
    return pts;
}

ReferenceGrid constant_reference(std::vector<double> points) {
    ReferenceGrid g;
    g.log_ref.assign(points.size(), 0.0);
    g.points = std::move(points);
    g.provenance = ReferenceKind::Constant;
    return g;
}

void validate(const ReferenceGrid& grid) {
    if (grid.points.size() < 2 || grid.points.size() != grid.log_ref.size())
        throw Error(ErrorCode::InvalidArgument, "reference grid needs matching points and values");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid.points[i]) || !std::isfinite(grid.log_ref[i]))
            throw Error(ErrorCode::InvalidArgument, "reference grid has non-finite entries");
        if (i > 0 && !(grid.points[i] > grid.points[i - 1]))
            throw Error(ErrorCode::InvalidArgument, "reference grid points must increase strictly");
    }
}

namespace {

// Unnormalized density values exp(l_i - max l) at the grid points.
std::vector<double> shifted_density(const ReferenceGrid& grid, double b, double scale, double& shift) {
    const double inv = 1.0 / (2.0 * scale * scale);
    std::vector<double> w(grid.size());
    shift = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double d = grid.points[i] - b;
        w[i] = grid.log_ref[i] - d * d * inv;
        shift = std::max(shift, w[i]);
    }
    for (double& v : w) v = std::exp(v - shift);
    return w;
}

// Trapezoid rule over the cells between points `from` and `to`.
double trapezoid(const std::vector<double>& x, const std::vector<double>& w, std::size_t from, std::size_t to) {
    double total = 0.0;
    for (std::size_t i = from + 1; i <= to; ++i) total += 0.5 * (x[i] - x[i - 1]) * (w[i] + w[i - 1]);
    return total;
}

} // namespace

double pivot(const ReferenceGrid& grid, double b_hat, double b, double scale) {
    const auto& x = grid.points;
    if (b_hat <= x.front()) return 1.0;
    if (b_hat >= x.back()) return 0.0;
    double shift = 0.0;
    const std::vector<double> w = shifted_density(grid, b, scale, shift);
    const auto k = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), b_hat) - x.begin()) - 1;
    const double frac = (b_hat - x[k]) / (x[k + 1] - x[k]);
    const double w_at = w[k] + frac * (w[k + 1] - w[k]);
    const double upper = 0.5 * (x[k + 1] - b_hat) * (w_at + w[k + 1]) + trapezoid(x, w, k + 1, x.size() - 1);
    const double lower = trapezoid(x, w, 0, k) + 0.5 * (b_hat - x[k]) * (w[k] + w_at);
    // smaller tail taken directly
    const double total = upper + lower;
    const double p = upper <= lower ? upper / total : 1.0 - lower / total;
    return std::clamp(p, 0.0, 1.0);
}

double two_sided_p(double pivot_value) { return std::min(1.0, 2.0 * std::min(pivot_value, 1.0 - pivot_value)); }

namespace {

double solve_level(const ReferenceGrid& grid, double b_hat, double scale, double level) {
    auto f = [&](double b) { return pivot(grid, b_hat, b, scale) - level; };
    double lo = b_hat - 10.0 * scale;
    double hi = b_hat + 10.0 * scale;
    const double limit = 1e3 * scale;
    while (f(lo) > 0.0) {
        lo = b_hat - 2.0 * (b_hat - lo);
        if (b_hat - lo > limit) throw Error(ErrorCode::RootNotBracketed, "pivot stays above the level");
    }
    while (f(hi) < 0.0) {
        hi = b_hat + 2.0 * (hi - b_hat);
        if (hi - b_hat > limit) throw Error(ErrorCode::RootNotBracketed, "pivot stays below the level");
    }
    const double tol = 1e-6 * std::min(1.0, scale);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct Moments {
    double mean;
    double variance;
};

// Mean and variance of t under the trapezoid-weighted grid law at b.
Moments grid_moments(const ReferenceGrid& grid, double b, double scale) {
    double shift = 0.0;
    const std::vector<double> w = shifted_density(grid, b, scale, shift);
    const auto& x = grid.points;
    const std::size_t n = x.size();
    double z = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? x[i] - x[i - 1] : 0.0;
        const double right = i + 1 < n ? x[i + 1] - x[i] : 0.0;
        const double wi = 0.5 * (left + right) * w[i];
        z += wi;
        m1 += wi * x[i];
    }
    const double mean = m1 / z;
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? x[i] - x[i - 1] : 0.0;
        const double right = i + 1 < n ? x[i + 1] - x[i] : 0.0;
        const double d = x[i] - mean;
        m2 += 0.5 * (left + right) * w[i] * d * d;
    }
    return {mean, m2 / z};
}

} // namespace

Interval confidence_interval(const ReferenceGrid& grid, double b_hat, double scale, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
    Interval ci;
    ci.lo = solve_level(grid, b_hat, scale, 0.5 * alpha);
    ci.hi = solve_level(grid, b_hat, scale, 1.0 - 0.5 * alpha);
    if (!(ci.lo < ci.hi)) throw Error(ErrorCode::RootNotBracketed, "degenerate confidence interval");
    return ci;
}

double mle_objective(const ReferenceGrid& grid, double b_hat, double b, double scale) {
    double shift = 0.0;
    const std::vector<double> w = shifted_density(grid, b, scale, shift);
    const auto& x = grid.points;
    double z = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double left = i > 0 ? x[i] - x[i - 1] : 0.0;
        const double right = i + 1 < x.size() ? x[i + 1] - x[i] : 0.0;
        z += 0.5 * (left + right) * w[i];
    }
    const double d = b_hat - b;
    return d * d / (2.0 * scale * scale) + shift + std::log(z);
}

double selection_mle(const ReferenceGrid& grid, double b_hat, double scale) {
    // The objective's derivative is (E_b[t] - b_hat) / scale^2, increasing in b.
    auto g = [&](double b) { return grid_moments(grid, b, scale); };
    double lo = b_hat - scale;
    double hi = b_hat + scale;
    const double limit = 1e4 * scale;
    while (g(lo).mean > b_hat) {
        lo = b_hat - 2.0 * (b_hat - lo);
        if (b_hat - lo > limit) throw Error(ErrorCode::NoConvergence, "MLE not bracketed below");
    }
    while (g(hi).mean < b_hat) {
        hi = b_hat + 2.0 * (hi - b_hat);
        if (hi - b_hat > limit) throw Error(ErrorCode::NoConvergence, "MLE not bracketed above");
    }
    double b = std::clamp(b_hat, lo, hi);
    for (int it = 0; it < 200; ++it) {
        const Moments m = g(b);
        const double r = m.mean - b_hat;
        if (r > 0.0) hi = b; else lo = b;
        if (std::abs(r) <= 1e-12 * std::max(1.0, scale) || hi - lo <= 1e-10 * scale) return b;
        double next = m.variance > 0.0 ? b - r * scale * scale / m.variance : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        b = next;
    }
    return b;
}

} // namespace seleqtl
