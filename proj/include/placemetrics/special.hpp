#ifndef PLACEMETRICS_SPECIAL_HPP
#define PLACEMETRICS_SPECIAL_HPP

#include <cmath>
#include <limits>

#include "error.hpp"

namespace placemetrics::special {

inline constexpr double kBetaCfTolerance = 1e-12;
inline constexpr int kBetaCfMaxIterations = 500;

namespace detail {

// Continued fraction for I_x(a, b) (modified Lentz), valid for x < (a + 1) / (a + b + 2).
inline double beta_continued_fraction(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) {
        d = tiny;
    }
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kBetaCfMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) {
            d = tiny;
        }
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) {
            d = tiny;
        }
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kBetaCfTolerance) {
            return h;
        }
    }
    throw Error(ErrorKind::Domain, "incomplete beta continued fraction did not converge");
}

inline double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

} // namespace detail

/**
 * Natural log of the regularized incomplete beta I_x(a, b).
 *
 * `y` must equal 1 - x; passing it separately keeps precision when x is close to 1.
 * The prefactor is assembled in log space so tails far below DBL_MIN stay finite.
 */
inline double log_incomplete_beta(double a, double b, double x, double y) {
    if (!(a > 0.0 && b > 0.0) || !(x >= 0.0 && x <= 1.0) || !(y >= 0.0 && y <= 1.0)) {
        throw Error(ErrorKind::Domain, "incomplete beta: invalid arguments");
    }
    if (x == 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    if (y == 0.0) {
        return 0.0;
    }
    const double log_front = a * std::log(x) + b * std::log(y) - detail::log_beta(a, b);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return log_front + std::log(detail::beta_continued_fraction(a, b, x)) - std::log(a);
    }
    // I_x(a, b) = 1 - I_y(b, a)
    const double log_complement = log_front + std::log(detail::beta_continued_fraction(b, a, y)) - std::log(b);
    return std::log(-std::expm1(log_complement));
}

inline double log_incomplete_beta(double a, double b, double x) { return log_incomplete_beta(a, b, x, 1.0 - x); }

/// log10 of P(F > f) for an F(df1, df2) variate.
inline double f_log10_survival(double f, double df1, double df2) {
    if (!(df1 >= 1.0 && df2 >= 1.0)) {
        throw Error(ErrorKind::Domain, "F survival: degrees of freedom must be >= 1");
    }
    if (std::isnan(f) || f < 0.0) {
        throw Error(ErrorKind::Domain, "F survival: statistic must be non-negative");
    }
    if (f == 0.0) {
        return 0.0;
    }
    if (std::isinf(f)) {
        return -std::numeric_limits<double>::infinity();
    }
    const double denom = df2 + df1 * f;
    const double x = df2 / denom;
    const double y = df1 * f / denom;
    return log_incomplete_beta(df2 / 2.0, df1 / 2.0, x, y) / std::log(10.0);
}

} // namespace placemetrics::special

#endif
