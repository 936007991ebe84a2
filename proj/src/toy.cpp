#include "recur2d/toy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "recur2d/error.hpp"
#include "recur2d/parallel.hpp"
#include "recur2d/stats.hpp"

namespace recur2d {

namespace {

constexpr std::uint64_t kStreamBuild = 0x5a;
constexpr std::uint64_t kStreamTau = 0x7a;
constexpr std::uint64_t kStreamDirect = 0xd1;
constexpr std::uint64_t kStreamDecomposed = 0xd2;
constexpr std::uint64_t kStreamSumMedian = 0x13;
constexpr std::uint64_t kStreamTrend = 0x7e;

constexpr double kInf = std::numeric_limits<double>::infinity();

class LogAccumulator {
public:
    void add(double x) noexcept {
        if (x <= max_) {
            sum_ += std::exp(x - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - x) + 1.0;
            max_ = x;
        }
    }
    double value() const noexcept { return sum_ == 0.0 ? -kInf : max_ + std::log(sum_); }

private:
    double max_ = -kInf;
    double sum_ = 0.0;
};

constexpr int kDx[4] = {1, -1, 0, 0};
constexpr int kDy[4] = {0, 0, 1, -1};

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::uint64_t srw_first_return(Rng& rng, std::uint64_t cap) {
    std::int64_t x = 0, y = 0;
    std::uint64_t n = 0;
    for (;;) {
        std::uint64_t r = rng();
        for (int j = 0; j < 32; ++j) {
            const unsigned b = r & 3u;
            r >>= 2;
            x += kDx[b];
            y += kDy[b];
            ++n;
            if (x == 0 && y == 0) return n;
            if (n >= cap) return 0;
        }
    }
}

HeavyTailReturnSampler HeavyTailReturnSampler::build(std::uint64_t cap, std::size_t n_samples, std::uint64_t seed,
                                                     unsigned workers, Tail tail) {
    if (cap < 1000) throw Error(ErrorCode::InvalidArgument, "sampler cap must be at least 1000");
    if (n_samples == 0) throw Error(ErrorCode::InvalidArgument, "sampler needs samples");
    std::vector<std::uint64_t> raw(n_samples);
    parallel_for(
        n_samples, workers,
        [&](std::size_t i) {
            Rng rng(derive_seed(seed, kStreamBuild, i));
            raw[i] = srw_first_return(rng, cap);
        },
        8);
    std::vector<double> logs;
    logs.reserve(n_samples);
    for (auto r : raw)
        if (r != 0) logs.push_back(std::log(static_cast<double>(r)));
    return from_parts(cap, std::move(logs), n_samples, seed, tail);
}

HeavyTailReturnSampler HeavyTailReturnSampler::from_parts(std::uint64_t cap, std::vector<double> log_values,
                                                          std::size_t n_total, std::uint64_t seed, Tail tail) {
    if (log_values.size() > n_total) throw Error(ErrorCode::InvalidArgument, "more uncensored values than samples");
    HeavyTailReturnSampler s;
    s.cap_ = cap;
    s.n_total_ = n_total;
    s.seed_ = seed;
    s.tail_ = tail;
    s.log_values_ = std::move(log_values);
    s.finish();
    return s;
}

void HeavyTailReturnSampler::finish() {
    std::sort(log_values_.begin(), log_values_.end());
    if (!log_values_.empty() && log_values_.back() > std::log(static_cast<double>(cap_)) + 1e-12)
        throw Error(ErrorCode::InvalidArgument, "sample above the cap");
    if (n_total_ == 0 || log_values_.empty()) throw Error(ErrorCode::EmptySample, "sampler has no uncensored values");
    censored_fraction_ = static_cast<double>(n_total_ - log_values_.size()) / static_cast<double>(n_total_);
    shift_ = 0.0;
    if (tail_ == Tail::Shifted && censored_fraction_ > 0.0)
        shift_ = std::numbers::pi / censored_fraction_ - std::log(static_cast<double>(cap_));
}

double HeavyTailReturnSampler::draw_log(Rng& rng) const {
    if (rng.uniform() < censored_fraction_) {
        const double base = std::log(static_cast<double>(cap_)) + shift_;
        return base / rng.uniform_open() - shift_;
    }
    return log_values_[rng.below(log_values_.size())];
}

double HeavyTailReturnSampler::empirical_survival(double s) const {
    const double ls = std::log(s);
    const auto above = static_cast<std::size_t>(log_values_.end() -
                                                std::upper_bound(log_values_.begin(), log_values_.end(), ls));
    return static_cast<double>(above + (n_total_ - log_values_.size())) / static_cast<double>(n_total_);
}

double HeavyTailReturnSampler::survival(double s) const {
    const double lc = std::log(static_cast<double>(cap_));
    if (s < static_cast<double>(cap_)) return empirical_survival(s);
    return censored_fraction_ * (lc + shift_) / (std::log(s) + shift_);
}

void HeavyTailReturnSampler::write(std::ostream& os) const {
    os << "recur2d-sampler v1\n";
    os << "cap " << cap_ << "\ncount " << log_values_.size() << "\nn_total " << n_total_ << "\nseed " << seed_
       << "\ntail " << (tail_ == Tail::Shifted ? "shifted" : "literal") << "\ncensored_fraction "
       << format_double(censored_fraction_) << "\ntail_shift " << format_double(shift_) << "\nvalues\n";
    for (double v : log_values_) os << format_double(v) << '\n';
}

void HeavyTailReturnSampler::save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw Error(ErrorCode::Io, "cannot write " + path);
    write(os);
    if (!os) throw Error(ErrorCode::Io, "write failed for " + path);
}

HeavyTailReturnSampler HeavyTailReturnSampler::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorCode::Io, "cannot read " + path);
    return read(is, path);
}

HeavyTailReturnSampler HeavyTailReturnSampler::read(std::istream& is, const std::string& path) {
    std::string line;
    std::getline(is, line);
    if (line != "recur2d-sampler v1") throw Error(ErrorCode::Io, path + ": not a sampler file");
    std::uint64_t cap = 0, seed = 0;
    std::size_t count = 0, n_total = 0;
    Tail tail = Tail::Shifted;
    for (;;) {
        if (!std::getline(is, line)) throw Error(ErrorCode::Io, path + ": truncated header");
        if (line == "values") break;
        std::istringstream ls(line);
        std::string key, value;
        ls >> key >> value;
        try {
            if (key == "cap") cap = std::stoull(value);
            else if (key == "count") count = std::stoull(value);
            else if (key == "n_total") n_total = std::stoull(value);
            else if (key == "seed") seed = std::stoull(value);
            else if (key == "tail") tail = value == "literal" ? Tail::Literal : Tail::Shifted;
            else if (key != "censored_fraction" && key != "tail_shift")
                throw Error(ErrorCode::Io, path + ": unknown key " + key);
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::Io, path + ": bad value for " + key);
        }
    }
    std::vector<double> values;
    values.reserve(count);
    double v;
    while (values.size() < count && is >> v) values.push_back(v);
    if (values.size() != count) throw Error(ErrorCode::Io, path + ": expected " + std::to_string(count) + " values");
    return from_parts(cap, std::move(values), n_total, seed, tail);
}

double log_sum_exp(const std::vector<double>& xs) {
    LogAccumulator acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

ToyTauResult toy_tau_cdf(double delta, const std::vector<double>& t_list, std::size_t n_trials,
                         const HeavyTailReturnSampler& sampler, std::uint64_t seed, unsigned workers) {
    if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, 1)");
    ToyTauResult out;
    out.delta = delta;
    out.scaled.resize(n_trials);
    parallel_for(n_trials, workers, [&](std::size_t i) {
        Rng rng(derive_seed(seed, kStreamTau, i));
        const std::uint64_t t = rng.geometric(delta);
        LogAccumulator acc;
        for (std::uint64_t j = 0; j < t; ++j) acc.add(sampler.draw_log(rng));
        out.scaled[i] = delta * acc.value();
    });
    const Ecdf e(out.scaled);
    for (double t : t_list) {
        ToyTauRow row;
        row.t = t;
        row.empirical = e(t);
        row.stderr_ = binomial_stderr(row.empirical, n_trials);
        row.limit = t / (t + std::numbers::pi);
        out.rows.push_back(row);
    }
    return out;
}

ToyVerifyResult toy_direct_vs_decomposed(double epsilon, std::size_t n_trials, std::uint64_t seed,
                                         std::uint64_t budget, unsigned workers) {
    if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
    if (epsilon >= 0.5) throw Error(ErrorCode::InvalidArgument, "no ball of radius >= 1/2 fits in the unit square");
    if (budget < 1) throw Error(ErrorCode::InvalidArgument, "budget must be positive");
    ToyVerifyResult out;
    out.epsilon = epsilon;
    out.budget = budget;
    out.direct_log.resize(n_trials);
    out.decomposed_log.resize(n_trials);
    std::vector<std::size_t> flagged_direct(n_trials), flagged_decomposed(n_trials);
    const double eps2 = epsilon * epsilon;
    auto inside = [epsilon](double y0, double y1) {
        return y0 >= epsilon && y0 <= 1.0 - epsilon && y1 >= epsilon && y1 <= 1.0 - epsilon;
    };

    parallel_for(n_trials, workers, [&](std::size_t i) {
        Rng rng(derive_seed(seed, kStreamDirect, i));
        double y0x, y0y;
        for (;;) {
            y0x = rng.uniform_open();
            y0y = rng.uniform_open();
            if (inside(y0x, y0y)) break;
            ++flagged_direct[i];
        }
        std::int64_t x = 0, y = 0;
        double result = kInf;
        std::uint64_t r = 0;
        int left = 0;
        for (std::uint64_t m = 1; m <= budget; ++m) {
            if (left == 0) {
                r = rng();
                left = 32;
            }
            const unsigned b = r & 3u;
            r >>= 2;
            --left;
            x += kDx[b];
            y += kDy[b];
            // |S_m + Y_m - Y_0| < eps is impossible when |S_m|_inf >= 2; the
            // spin Y_m is independent of S, so it is drawn only when needed.
            if (x < -1 || x > 1 || y < -1 || y > 1) continue;
            const double dx = static_cast<double>(x) + rng.uniform_open() - y0x;
            const double dy = static_cast<double>(y) + rng.uniform_open() - y0y;
            if (dx * dx + dy * dy < eps2) {
                result = std::log(static_cast<double>(m));
                break;
            }
        }
        out.direct_log[i] = result;
    });

    const double delta = std::numbers::pi * eps2;
    parallel_for(n_trials, workers, [&](std::size_t i) {
        Rng rng(derive_seed(seed, kStreamDecomposed, i));
        for (;;) {
            const double y0x = rng.uniform_open();
            const double y0y = rng.uniform_open();
            if (inside(y0x, y0y)) break;
            ++flagged_decomposed[i];
        }
        const std::uint64_t t = rng.geometric(delta);
        std::uint64_t total = 0;
        double result = kInf;
        for (std::uint64_t j = 0; j < t; ++j) {
            const std::uint64_t r = srw_first_return(rng, budget - total);
            if (r == 0) break;
            total += r;
            if (j + 1 == t) result = std::log(static_cast<double>(total));
            else if (total >= budget) break;
        }
        out.decomposed_log[i] = result;
    });

    std::size_t cens_a = 0, cens_b = 0;
    for (std::size_t i = 0; i < n_trials; ++i) {
        out.direct_flagged += flagged_direct[i];
        out.decomposed_flagged += flagged_decomposed[i];
        cens_a += std::isinf(out.direct_log[i]) ? 1 : 0;
        cens_b += std::isinf(out.decomposed_log[i]) ? 1 : 0;
    }
    out.direct_censored = static_cast<double>(cens_a) / static_cast<double>(n_trials);
    out.decomposed_censored = static_cast<double>(cens_b) / static_cast<double>(n_trials);
    auto to_ecdf = [&](const std::vector<double>& v) {
        std::vector<double> vals(v);
        std::vector<bool> cens(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            if (std::isinf(v[i])) {
                cens[i] = true;
                vals[i] = std::log(static_cast<double>(budget));
            }
        return Ecdf(vals, cens);
    };
    out.ks = ks_two_sample(to_ecdf(out.direct_log), to_ecdf(out.decomposed_log));
    return out;
}

std::vector<MedianRow> lemma3_median_check(const std::vector<int>& n_list, std::size_t n_trials,
                                           const HeavyTailReturnSampler& sampler, std::uint64_t seed,
                                           unsigned workers) {
    std::vector<MedianRow> rows;
    for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
        const int n = n_list[idx];
        if (n < 2) throw Error(ErrorCode::InvalidArgument, "log log R_n / log n needs n >= 2");
        std::vector<double> stat(n_trials);
        parallel_for(n_trials, workers, [&](std::size_t i) {
            Rng rng(derive_seed(seed, kStreamSumMedian + static_cast<std::uint64_t>(n) * 0x100, i));
            LogAccumulator acc;
            for (int j = 0; j < n; ++j) acc.add(sampler.draw_log(rng));
            stat[i] = std::log(acc.value()) / std::log(static_cast<double>(n));
        });
        rows.push_back({static_cast<double>(n), median(std::move(stat))});
    }
    return rows;
}

std::vector<MedianRow> toy_trend(const std::vector<double>& eps_list, std::size_t n_trials,
                                 const HeavyTailReturnSampler& sampler, std::uint64_t seed, unsigned workers) {
    std::vector<MedianRow> rows;
    for (std::size_t idx = 0; idx < eps_list.size(); ++idx) {
        const double eps = eps_list[idx];
        const double delta = std::numbers::pi * eps * eps;
        if (!(eps > 0.0 && eps < 1.0 && delta < 1.0))
            throw Error(ErrorCode::InvalidArgument, "toy trend needs 0 < eps < 1/sqrt(pi)");
        std::vector<double> stat(n_trials);
        parallel_for(n_trials, workers, [&](std::size_t i) {
            Rng rng(derive_seed(seed, kStreamTrend + idx * 0x100, i));
            const std::uint64_t t = rng.geometric(delta);
            LogAccumulator acc;
            for (std::uint64_t j = 0; j < t; ++j) acc.add(sampler.draw_log(rng));
            stat[i] = std::log(acc.value()) / -std::log(eps);
        });
        rows.push_back({eps, median(std::move(stat))});
    }
    return rows;
}

}  // namespace recur2d
