#include "seleqtl/normal.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <limits>

namespace seleqtl::normal {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
// Below this argument erfc underflows; the asymptotic Mills-ratio series takes over.
constexpr double kTailSwitch = -37.0;

const boost::math::normal_distribution<double>& standard() {
    static const boost::math::normal_distribution<double> dist(0.0, 1.0);
    return dist;
}

double log_cdf_asymptotic(double x) {
    const double x2 = x * x;
    const double inv = 1.0 / x2;
    const double series = 1.0 - inv * (1.0 - 3.0 * inv * (1.0 - 5.0 * inv * (1.0 - 7.0 * inv)));
    return -0.5 * x2 - kLogSqrt2Pi - std::log(-x) + std::log(series);
}

} // namespace

double pdf(double x) { return std::exp(log_pdf(x)); }

double log_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

double cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double log_cdf(double x) {
    if (std::isnan(x)) return x;
    if (x > 0.0) return std::log1p(-sf(x));
    if (x > kTailSwitch) return std::log(cdf(x));
    if (std::isinf(x)) return -std::numeric_limits<double>::infinity();
    return log_cdf_asymptotic(x);
}

double log_sf(double x) { return log_cdf(-x); }

double quantile(double p) { return boost::math::quantile(standard(), p); }

double upper_quantile(double tail) {
    return boost::math::quantile(boost::math::complement(standard(), tail));
}

double log1mexp(double x) {
    if (x > -0.6931471805599453) return std::log(-std::expm1(x));
    return std::log1p(-std::exp(x));
}

double log_interval(double a, double b) {
    if (!(a < b)) return -std::numeric_limits<double>::infinity();
    if (a >= 0.0) return log_interval(-b, -a);
    if (b <= 0.0) {
        const double lb = log_cdf(b);
        const double la = log_cdf(a);
        if (la == -std::numeric_limits<double>::infinity()) return lb;
        return lb + log1mexp(la - lb);
    }
    // a < 0 < b: erf values have opposite signs, so the difference never cancels.
    return std::log(0.5 * (std::erf(b * kInvSqrt2) - std::erf(a * kInvSqrt2)));
}

LogIntervalDerivs log_interval_derivs(double m, double half_width, double scale) {
    const double a = (m - half_width) / scale;
    const double b = (m + half_width) / scale;
    LogIntervalDerivs out{};
    out.value = log_interval(a, b);
    const double ra = std::exp(log_pdf(a) - out.value);
    const double rb = std::exp(log_pdf(b) - out.value);
    out.d1 = (rb - ra) / scale;
    out.d2 = (a * ra - b * rb) / (scale * scale) - out.d1 * out.d1;
    if (out.d2 > 0.0) out.d2 = 0.0;
    return out;
}

} // namespace seleqtl::normal
