#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace recur2d {

/// Empirical CDF with right-censoring. A censored entry c means "true value > c":
/// it counts as above t for t <= c and is unknown for t > c.
class Ecdf {
public:
    Ecdf() = default;
    explicit Ecdf(std::vector<double> values);
    Ecdf(const std::vector<double>& values, const std::vector<bool>& censored);

    std::size_t size() const noexcept { return observed_.size() + censored_.size(); }
    std::size_t observed_count() const noexcept { return observed_.size(); }
    std::size_t censored_count() const noexcept { return censored_.size(); }
    const std::vector<double>& observed() const noexcept { return observed_; }  // sorted
    const std::vector<double>& censored() const noexcept { return censored_; }  // sorted thresholds

    /// #{observed <= t} / #{entries with known status at t}; 0 with no known entries.
    double operator()(double t) const;
    /// Fraction of entries whose status at t is known.
    double coverage(double t) const;
    /// Smallest censoring threshold, +inf without censoring.
    double censor_floor() const;

private:
    std::vector<double> observed_;
    std::vector<double> censored_;
};

/// Closed-form reference laws used by the acceptance checks.
class ReferenceCdf {
public:
    enum class Tag { Exponential, Recurrence, Toy, Normal, Mixture };

    /// 1 - e^{-t}.
    static ReferenceCdf exponential();
    /// G_beta(t) = beta t / (1 + beta t).
    static ReferenceCdf recurrence(double beta);
    /// t / (t + pi).
    static ReferenceCdf toy();
    /// N(0, variance).
    static ReferenceCdf normal(double variance);
    /// sum_i w_i G_{rate_i}(t).
    static ReferenceCdf mixture(std::vector<double> weights, std::vector<double> rates);

    double operator()(double t) const;
    Tag tag() const noexcept { return tag_; }
    std::string name() const;

private:
    Tag tag_ = Tag::Exponential;
    double param_ = 1.0;
    std::vector<double> weights_;
    std::vector<double> rates_;
};

struct KsResult {
    double distance = 0.0;
    /// Fraction of the sample lying in the region where the ECDF is exact.
    double coverage = 1.0;
    std::size_t used = 0;
};

/// Sup distance over sample points and their left limits. With censoring the
/// sup is restricted to t below the smallest censoring threshold.
/// Throws EmptySample when no observed value lies in that region.
KsResult ks_distance(const Ecdf& e, const ReferenceCdf& ref);

/// Two-sample KS statistic; censored entries act as +inf.
double ks_two_sample(const Ecdf& a, const Ecdf& b);

struct Regression {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

/// Ordinary least squares. Throws DegenerateDesign for < 3 points or constant xs.
Regression slope_regression(const std::vector<double>& xs, const std::vector<double>& ys);

/// Bootstrap standard error of a statistic (resampling with replacement).
double bootstrap_stderr(const std::vector<double>& sample,
                        const std::function<double(const std::vector<double>&)>& statistic, int n_boot,
                        std::uint64_t seed);

/// sqrt(p (1 - p) / n).
double binomial_stderr(double p, std::size_t n);

/// Sample quantile by linear interpolation (type 7); the vector is copied.
double quantile(std::vector<double> v, double q);
inline double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);  // unbiased

}  // namespace recur2d
