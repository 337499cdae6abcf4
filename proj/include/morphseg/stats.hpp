#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>

#include <boost/math/special_functions/beta.hpp>

#include "morphseg/error.hpp"

namespace morphseg::stats {

inline double mean(std::span<const double> xs)
{
    if (xs.empty()) throw data_shape_error("mean of an empty sample");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

/// Unbiased (n - 1) sample variance; 0 for a single observation.
inline double sample_variance(std::span<const double> xs)
{
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double ss = 0.0;
    for (const double x : xs) ss += (x - m) * (x - m);
    return ss / static_cast<double>(xs.size() - 1);
}

inline double sample_sd(std::span<const double> xs) { return std::sqrt(sample_variance(xs)); }

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
inline double regularized_incomplete_beta(double a, double b, double x)
{
    if (!(a > 0.0) || !(b > 0.0)) throw argument_error("incomplete beta: a and b must be positive");
    if (std::isnan(x) || x < 0.0 || x > 1.0) throw argument_error("incomplete beta: x outside [0, 1]");
    return boost::math::ibeta(a, b, x);
}

/// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
inline double student_t_two_tailed_p(double t, double df)
{
    if (!(df > 0.0)) throw argument_error("t distribution: df must be positive");
    if (std::isinf(t)) return 0.0;
    const double x = df / (df + t * t);
    return std::min(1.0, regularized_incomplete_beta(df / 2.0, 0.5, x));
}

/// P(F >= f) for the F distribution with (d1, d2) degrees of freedom.
inline double f_survival(double f, double d1, double d2)
{
    if (!(d1 > 0.0) || !(d2 > 0.0)) throw argument_error("F distribution: degrees of freedom must be positive");
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    const double x = d2 / (d2 + d1 * f);
    return regularized_incomplete_beta(d2 / 2.0, d1 / 2.0, x);
}

struct StatTestResult {
    double statistic;
    double degrees_of_freedom;
    double p_value;
    double effect_size;  // Cohen's d, pooled standard deviation
};

/// Two-tailed Welch's t-test of mean(a) vs mean(b) with Welch-Satterthwaite
/// degrees of freedom and unbiased sample variances.
inline StatTestResult welch_t_test(std::span<const double> a, std::span<const double> b)
{
    if (a.size() < 2 || b.size() < 2) throw data_shape_error("welch_t_test: each sample needs at least 2 values");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double ma = mean(a), mb = mean(b);
    const double va = sample_variance(a), vb = sample_variance(b);
    if (va == 0.0 && vb == 0.0) throw data_shape_error("welch_t_test: both samples have zero variance");
    const double sa = va / na, sb = vb / nb;
    const double se = std::sqrt(sa + sb);
    const double t = (ma - mb) / se;
    const double df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    const double pooled = std::sqrt(((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0));
    return {t, df, student_t_two_tailed_p(t, df), (ma - mb) / pooled};
}

struct RegressionResult {
    double slope;
    double intercept;
    double r_squared;
    double f_statistic;
    double df_residual;
    double p_value;
};

/// Simple least-squares regression y = slope * x + intercept with the
/// F(1, n - 2) test of the slope.
inline RegressionResult ols_regression(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) throw data_shape_error("ols_regression: x and y differ in length");
    if (x.size() < 3) throw data_shape_error("ols_regression: need at least 3 points");
    const double n = static_cast<double>(x.size());
    const double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw data_shape_error("ols_regression: x is constant");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    const double r2 = syy == 0.0 ? 0.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
    const double df_resid = n - 2.0;
    const double f = r2 >= 1.0 ? std::numeric_limits<double>::infinity() : r2 * df_resid / (1.0 - r2);
    return {slope, intercept, r2, f, df_resid, f_survival(f, 1.0, df_resid)};
}

}  // namespace morphseg::stats
