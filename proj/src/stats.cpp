#include "recur2d/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "recur2d/error.hpp"
#include "recur2d/rng.hpp"

namespace recur2d {

Ecdf::Ecdf(std::vector<double> values) : observed_(std::move(values)) {
    std::sort(observed_.begin(), observed_.end());
}

Ecdf::Ecdf(const std::vector<double>& values, const std::vector<bool>& censored) {
    if (values.size() != censored.size()) throw Error(ErrorCode::InvalidArgument, "censor flags size mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) (censored[i] ? censored_ : observed_).push_back(values[i]);
    std::sort(observed_.begin(), observed_.end());
    std::sort(censored_.begin(), censored_.end());
}

double Ecdf::operator()(double t) const {
    const auto below = static_cast<double>(std::upper_bound(observed_.begin(), observed_.end(), t) - observed_.begin());
    // censored entries with c >= t are known to exceed t
    const auto known_cens = static_cast<double>(censored_.end() - std::lower_bound(censored_.begin(), censored_.end(), t));
    const double known = static_cast<double>(observed_.size()) + known_cens;
    return known > 0.0 ? below / known : 0.0;
}

double Ecdf::coverage(double t) const {
    if (size() == 0) return 0.0;
    const auto known_cens = static_cast<double>(censored_.end() - std::lower_bound(censored_.begin(), censored_.end(), t));
    return (static_cast<double>(observed_.size()) + known_cens) / static_cast<double>(size());
}

double Ecdf::censor_floor() const {
    return censored_.empty() ? std::numeric_limits<double>::infinity() : censored_.front();
}

ReferenceCdf ReferenceCdf::exponential() { return {}; }

ReferenceCdf ReferenceCdf::recurrence(double beta) {
    ReferenceCdf r;
    r.tag_ = Tag::Recurrence;
    r.param_ = beta;
    return r;
}

ReferenceCdf ReferenceCdf::toy() {
    ReferenceCdf r;
    r.tag_ = Tag::Toy;
    r.param_ = std::numbers::pi;
    return r;
}

ReferenceCdf ReferenceCdf::normal(double variance) {
    if (!(variance > 0.0)) throw Error(ErrorCode::InvalidArgument, "normal reference needs positive variance");
    ReferenceCdf r;
    r.tag_ = Tag::Normal;
    r.param_ = variance;
    return r;
}

ReferenceCdf ReferenceCdf::mixture(std::vector<double> weights, std::vector<double> rates) {
    if (weights.size() != rates.size() || weights.empty())
        throw Error(ErrorCode::InvalidArgument, "mixture needs matching nonempty weights and rates");
    ReferenceCdf r;
    r.tag_ = Tag::Mixture;
    r.weights_ = std::move(weights);
    r.rates_ = std::move(rates);
    return r;
}

double ReferenceCdf::operator()(double t) const {
    switch (tag_) {
        case Tag::Exponential: return t <= 0.0 ? 0.0 : -std::expm1(-t);
        case Tag::Recurrence: return t <= 0.0 ? 0.0 : param_ * t / (1.0 + param_ * t);
        case Tag::Toy: return t <= 0.0 ? 0.0 : t / (t + param_);
        case Tag::Normal: return 0.5 * std::erfc(-t / std::sqrt(2.0 * param_));
        case Tag::Mixture: {
            if (t <= 0.0) return 0.0;
            double s = 0.0;
            for (std::size_t i = 0; i < weights_.size(); ++i) s += weights_[i] * rates_[i] * t / (1.0 + rates_[i] * t);
            return s;
        }
    }
    return 0.0;
}

std::string ReferenceCdf::name() const {
    switch (tag_) {
        case Tag::Exponential: return "exponential(1)";
        case Tag::Recurrence: return "recurrence(beta=" + std::to_string(param_) + ")";
        case Tag::Toy: return "toy t/(t+pi)";
        case Tag::Normal: return "normal(0," + std::to_string(param_) + ")";
        case Tag::Mixture: return "mixture(" + std::to_string(weights_.size()) + ")";
    }
    return "?";
}

KsResult ks_distance(const Ecdf& e, const ReferenceCdf& ref) {
    const double floor = e.censor_floor();
    const auto& xs = e.observed();
    const auto n_valid = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), floor) - xs.begin());
    if (n_valid == 0) throw Error(ErrorCode::EmptySample, "no uncensored values below the censoring floor");
    // Every entry has known status below the floor, so the ECDF there is i / N.
    const auto total = static_cast<double>(e.size());
    double d = 0.0;
    for (std::size_t i = 0; i < n_valid; ++i) {
        const double f = ref(xs[i]);
        d = std::max({d, std::abs(static_cast<double>(i + 1) / total - f), std::abs(static_cast<double>(i) / total - f)});
    }
    KsResult out;
    out.used = n_valid;
    if (std::isfinite(floor)) {
        // left limit at the floor
        d = std::max(d, std::abs(static_cast<double>(n_valid) / total - ref(std::nextafter(floor, -1e300))));
        out.coverage = static_cast<double>(n_valid) / total;
    }
    out.distance = d;
    return out;
}

double ks_two_sample(const Ecdf& a, const Ecdf& b) {
    if (a.size() == 0 || b.size() == 0) throw Error(ErrorCode::EmptySample, "two-sample KS needs nonempty samples");
    const auto& x = a.observed();
    const auto& y = b.observed();
    const auto na = static_cast<double>(a.size());
    const auto nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() || j < y.size()) {
        double t;
        if (j == y.size() || (i < x.size() && x[i] <= y[j])) t = x[i];
        else t = y[j];
        while (i < x.size() && x[i] <= t) ++i;
        while (j < y.size() && y[j] <= t) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

Regression slope_regression(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw Error(ErrorCode::InvalidArgument, "regression needs equal-length inputs");
    const std::size_t n = xs.size();
    if (n < 3) throw Error(ErrorCode::DegenerateDesign, "regression needs at least 3 points");
    const double mx = mean(xs), my = mean(ys);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw Error(ErrorCode::DegenerateDesign, "all x values are equal");
    Regression r;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = ys[i] - r.intercept - r.slope * xs[i];
        rss += e * e;
    }
    r.slope_stderr = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
    return r;
}

double bootstrap_stderr(const std::vector<double>& sample,
                        const std::function<double(const std::vector<double>&)>& statistic, int n_boot,
                        std::uint64_t seed) {
    if (sample.empty()) throw Error(ErrorCode::EmptySample, "bootstrap of an empty sample");
    if (n_boot < 2) throw Error(ErrorCode::InvalidArgument, "bootstrap needs at least 2 resamples");
    Rng rng(seed);
    std::vector<double> stats(static_cast<std::size_t>(n_boot));
    std::vector<double> re(sample.size());
    for (auto& s : stats) {
        for (auto& v : re) v = sample[rng.below(sample.size())];
        s = statistic(re);
    }
    return std::sqrt(variance(stats));
}

double binomial_stderr(double p, std::size_t n) {
    return n == 0 ? 0.0 : std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw Error(ErrorCode::EmptySample, "quantile of an empty sample");
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    if (std::isinf(v[lo]) || std::isinf(v[hi])) return h - std::floor(h) == 0.0 ? v[lo] : v[hi];
    return v[lo] + (h - std::floor(h)) * (v[hi] - v[lo]);
}

double mean(const std::vector<double>& v) {
    if (v.empty()) throw Error(ErrorCode::EmptySample, "mean of an empty sample");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
    if (v.size() < 2) throw Error(ErrorCode::EmptySample, "variance needs two values");
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

}  // namespace recur2d
