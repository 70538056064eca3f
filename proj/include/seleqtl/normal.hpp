#pragma once

namespace seleqtl::normal {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double pdf(double x);
double log_pdf(double x);
double cdf(double x);
// Upper tail 1 - cdf(x), accurate for large x.
double sf(double x);
double log_cdf(double x);
double log_sf(double x);
// Inverse of cdf; p in (0, 1).
double quantile(double p);
// Inverse of sf; accurate for tiny upper-tail probabilities.
double upper_quantile(double tail);

// log(cdf(b) - cdf(a)) for a < b without cancellation in either tail.
double log_interval(double a, double b);

// log(1 - exp(x)) for x < 0.
double log1mexp(double x);

// Value, first and second derivative of m -> log(cdf((m + h) / s) - cdf((m - h) / s)).
// The function is concave in m.
struct LogIntervalDerivs {
    double value;
    double d1;
    double d2;
};
LogIntervalDerivs log_interval_derivs(double m, double half_width, double scale);

} // namespace seleqtl::normal
