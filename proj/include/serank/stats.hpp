#ifndef SERANK_STATS_HPP
#define SERANK_STATS_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace serank {

class DegenerateSample : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Per-keyword scores of one engine (or of the consensus), in keyword order.
struct ScoreSample {
    std::string engine;
    std::vector<double> values;
};

struct ConfidenceInterval {
    double mean = 0.0;
    double half_width = 0.0;
};

/// Normal-approximation interval: mean +/- z * s / sqrt(m), s with divisor
/// m - 1. Throws DegenerateSample for m < 2 and std::invalid_argument for a
/// level outside (0, 1).
ConfidenceInterval confidence_interval(const ScoreSample& sample, double level = 0.95);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    std::size_t dof = 0;
    /// Differences are constant and non-zero: t is infinite, p is 0.
    bool exact_separation = false;
};

/// Two-sided paired t-test on a - b.
TTestResult paired_t_test(const ScoreSample& a, const ScoreSample& b);

struct PairwiseTest {
    std::size_t first = 0;   // index into the sample list
    std::size_t second = 0;  // always > first
    TTestResult result;
};

/// One test per unordered pair (i < j), row-major.
std::vector<PairwiseTest> pairwise_t_tests(std::span<const ScoreSample> samples);

/// I_x(a, b) by Lentz's continued fraction, using the symmetry relation
/// to keep the fraction in its fast-converging region.
double regularized_incomplete_beta(double x, double a, double b);

/// P(|T| >= |t|) for Student's t with nu degrees of freedom.
double student_t_two_sided_p(double t, double nu);
double student_t_cdf(double t, double nu);

double normal_cdf(double x);
/// Inverse of normal_cdf for p in (0, 1).
double normal_quantile(double p);

/// "1.3e-38": two significant digits, scientific.
std::string format_pvalue(double p);

}  // namespace serank

#endif  // SERANK_STATS_HPP
