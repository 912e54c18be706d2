#include "serank/stats.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace serank {
namespace {

constexpr double kFpMin = 1e-300;
constexpr double kCfTolerance = 1e-12;
constexpr int kCfMaxIterations = 300;

// Continued fraction for I_x(a, b), modified Lentz.
double beta_continued_fraction(double x, double a, double b) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kCfMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;

        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kCfTolerance) return h;
    }
    throw std::runtime_error("incomplete beta continued fraction did not converge");
}

// x and y = 1 - x are passed separately so callers that know 1 - x exactly
// (the t-distribution tail) do not lose it to cancellation.
double incomplete_beta(double x, double y, double a, double b) {
    if (x <= 0.0) return 0.0;
    if (y <= 0.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log(y);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(x, a, b) / a;
    return 1.0 - front * beta_continued_fraction(y, b, a) / b;
}

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v, double mean) {
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete beta needs a, b > 0");
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("incomplete beta needs 0 <= x <= 1");
    return incomplete_beta(x, 1.0 - x, a, b);
}

double student_t_two_sided_p(double t, double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("degrees of freedom must be positive");
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return 0.0;
    const double t2 = t * t;
    const double x = nu / (nu + t2);
    const double y = t2 / (nu + t2);
    const double p = incomplete_beta(x, y, nu / 2.0, 0.5);
    return std::min(1.0, std::max(0.0, p));
}

double student_t_cdf(double t, double nu) {
    const double tail = student_t_two_sided_p(t, nu) / 2.0;
    return t < 0.0 ? tail : 1.0 - tail;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal quantile needs 0 < p < 1");

    // Rational approximation (Acklam), then one Halley step against erfc.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

ConfidenceInterval confidence_interval(const ScoreSample& sample, double level) {
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("confidence level must lie in (0, 1)");
    const std::size_t m = sample.values.size();
    if (m < 2) throw DegenerateSample("confidence interval for '" + sample.engine +
                                      "' needs at least 2 values");
    const double mean = mean_of(sample.values);
    const double sd = sample_sd(sample.values, mean);
    const double z = normal_quantile((1.0 + level) / 2.0);
    return {mean, z * sd / std::sqrt(static_cast<double>(m))};
}

TTestResult paired_t_test(const ScoreSample& a, const ScoreSample& b) {
    if (a.values.size() != b.values.size())
        throw std::invalid_argument("paired t-test needs samples of equal length ('" + a.engine +
                                    "' vs '" + b.engine + "')");
    const std::size_t m = a.values.size();
    if (m < 2) throw DegenerateSample("paired t-test needs at least 2 pairs");

    std::vector<double> diff(m);
    for (std::size_t k = 0; k < m; ++k) diff[k] = a.values[k] - b.values[k];
    const double mean = mean_of(diff);
    const double sd = sample_sd(diff, mean);

    TTestResult out;
    out.dof = m - 1;
    if (sd == 0.0) {
        if (mean == 0.0) return out;
        out.t = mean > 0.0 ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
        out.p = 0.0;
        out.exact_separation = true;
        return out;
    }
    out.t = mean / (sd / std::sqrt(static_cast<double>(m)));
    out.p = student_t_two_sided_p(out.t, static_cast<double>(out.dof));
    return out;
}

std::vector<PairwiseTest> pairwise_t_tests(std::span<const ScoreSample> samples) {
    std::vector<PairwiseTest> out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            out.push_back({i, j, paired_t_test(samples[i], samples[j])});
        }
    }
    return out;
}

std::string format_pvalue(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1e", p);
    return buf;
}

}  // namespace serank
