#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace seleqtl {

enum class ReferenceKind { Chernoff, Quadrature, Constant };

std::string_view to_string(ReferenceKind kind);

// Log reference measure on a sorted grid, up to an additive constant.
struct ReferenceGrid {
    std::vector<double> points;
    std::vector<double> log_ref;
    ReferenceKind provenance = ReferenceKind::Constant;

    std::size_t size() const { return points.size(); }
};

struct GridOptions {
    double half_width = 10.0;  // in units of the target's standard deviation
    std::size_t points = 1201;
};

// b_hat +- half_width * scale with an odd number of equispaced points, so
// b_hat is the centre point.
std::vector<double> build_grid(double b_hat, double scale, const GridOptions& options = {});

ReferenceGrid constant_reference(std::vector<double> points);

// Throws InvalidArgument unless points are strictly increasing and every
// log_ref entry is finite.
void validate(const ReferenceGrid& grid);

// P_b(t >= b_hat) under the density proportional to
// exp(-(t - b)^2 / 2 scale^2 + log_ref(t)), integrated by the trapezoid rule
// on the grid.
double pivot(const ReferenceGrid& grid, double b_hat, double b, double scale);

double two_sided_p(double pivot_value);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const { return lo <= x && x <= hi; }
    double length() const { return hi - lo; }
};

// Solves pivot(lo) = alpha / 2 and pivot(hi) = 1 - alpha / 2 by bisection.
// Throws RootNotBracketed when the pivot cannot reach the levels within
// b_hat +- 1000 scale.
Interval confidence_interval(const ReferenceGrid& grid, double b_hat, double scale, double alpha);

// (b_hat - b)^2 / 2 scale^2 + log sum_t w_t exp(-(t - b)^2 / 2 scale^2 + log_ref(t))
double mle_objective(const ReferenceGrid& grid, double b_hat, double b, double scale);

double selection_mle(const ReferenceGrid& grid, double b_hat, double scale);

} // namespace seleqtl
