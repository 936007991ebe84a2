#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "recur2d/rng.hpp"

namespace recur2d {

/// First return time of the simple walk on Z^2 to the origin, or 0 when it
/// exceeds `cap` steps. Two random bits per step.
std::uint64_t srw_first_return(Rng& rng, std::uint64_t cap);

/// Law of the first return R_1 of the planar simple walk: direct samples
/// below the cap plus an analytic tail above it.
///
/// Tail models for s >= cap (f = censored fraction):
///   Shifted: P(R > s) = f (log cap + c) / (log s + c), c = pi / f - log cap,
///            so that P(R > s) = pi / (log s + c) keeps the constant pi;
///   Literal: P(R > s) = f log cap / log s.
class HeavyTailReturnSampler {
public:
    enum class Tail { Shifted, Literal };

    static HeavyTailReturnSampler build(std::uint64_t cap, std::size_t n_samples, std::uint64_t seed,
                                        unsigned workers = 1, Tail tail = Tail::Shifted);
    /// From already simulated data (log values of uncensored returns).
    static HeavyTailReturnSampler from_parts(std::uint64_t cap, std::vector<double> log_values, std::size_t n_total,
                                             std::uint64_t seed, Tail tail = Tail::Shifted);

    std::uint64_t cap() const noexcept { return cap_; }
    std::size_t total() const noexcept { return n_total_; }
    std::size_t uncensored() const noexcept { return log_values_.size(); }
    double censored_fraction() const noexcept { return censored_fraction_; }
    double tail_shift() const noexcept { return shift_; }
    Tail tail() const noexcept { return tail_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::vector<double>& log_values() const noexcept { return log_values_; }  // sorted

    /// log R for one draw.
    double draw_log(Rng& rng) const;
    /// P(R > s) under the sampler law.
    double survival(double s) const;
    /// Fraction of direct samples with R > s (s < cap), censored ones included.
    double empirical_survival(double s) const;

    /// Text format "recur2d-sampler v1".
    void write(std::ostream& os) const;
    static HeavyTailReturnSampler read(std::istream& is, const std::string& origin = "<stream>");
    void save(const std::string& path) const;
    static HeavyTailReturnSampler load(const std::string& path);

private:
    void finish();

    std::uint64_t cap_ = 0;
    std::size_t n_total_ = 0;
    std::uint64_t seed_ = 0;
    Tail tail_ = Tail::Shifted;
    std::vector<double> log_values_;
    double censored_fraction_ = 0.0;
    double shift_ = 0.0;
};

/// log sum_i exp(x_i), stable.
double log_sum_exp(const std::vector<double>& xs);

struct ToyTauRow {
    double t = 0.0;
    double empirical = 0.0;
    double stderr_ = 0.0;
    double limit = 0.0;  // t / (t + pi)
};

struct ToyTauResult {
    double delta = 0.0;
    std::vector<double> scaled;  // delta log tau per trial
    std::vector<ToyTauRow> rows;
};

/// tau = R_T with T ~ geometric(delta): T gaps drawn from the sampler, summed in log domain.
ToyTauResult toy_tau_cdf(double delta, const std::vector<double>& t_list, std::size_t n_trials,
                         const HeavyTailReturnSampler& sampler, std::uint64_t seed, unsigned workers = 1);

struct ToyVerifyResult {
    double epsilon = 0.0;
    std::uint64_t budget = 0;
    std::vector<double> direct_log;      // log tau, +inf when censored
    std::vector<double> decomposed_log;
    std::size_t direct_flagged = 0;      // starts whose ball leaves the unit square (skipped)
    std::size_t decomposed_flagged = 0;
    double direct_censored = 0.0;
    double decomposed_censored = 0.0;
    double ks = 0.0;
};

/// Direct simulation of M_n = S_n + Y_n against the R/T decomposition, with
/// independent seeds. Each side collects n_trials starts with B(Y_0, eps)
/// inside the unit square; other starts are counted as flagged and skipped.
ToyVerifyResult toy_direct_vs_decomposed(double epsilon, std::size_t n_trials, std::uint64_t seed,
                                         std::uint64_t budget, unsigned workers = 1);

struct MedianRow {
    double x = 0.0;        // n or epsilon
    double median = 0.0;
};

/// Median of log log R_n / log n, with R_n a sum of n sampler draws. n >= 2.
std::vector<MedianRow> lemma3_median_check(const std::vector<int>& n_list, std::size_t n_trials,
                                           const HeavyTailReturnSampler& sampler, std::uint64_t seed,
                                           unsigned workers = 1);

/// Median of log log tau_eps / (-log eps) with delta = pi eps^2.
std::vector<MedianRow> toy_trend(const std::vector<double>& eps_list, std::size_t n_trials,
                                 const HeavyTailReturnSampler& sampler, std::uint64_t seed, unsigned workers = 1);

}  // namespace recur2d
