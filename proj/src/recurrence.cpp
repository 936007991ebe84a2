#include "recur2d/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "recur2d/error.hpp"
#include "recur2d/parallel.hpp"

namespace recur2d {

namespace {

constexpr std::uint64_t kStreamConditional = 0x41a7;
constexpr std::uint64_t kStreamUnconditional = 0x41a8;
constexpr std::uint64_t kStreamTail = 0x7a11;
constexpr std::uint64_t kStreamQ = 0x9a;

/// Last 2k+1 symbols of a stream, compared against a fixed word.
class Ring {
public:
    explicit Ring(const std::vector<Symbol>& init) : buf_(init), target_(init) {}

    void push(Symbol s) noexcept {
        buf_[head_] = s;
        head_ = head_ + 1 == buf_.size() ? 0 : head_ + 1;
    }
    /// Symbol at offset i from the oldest entry.
    Symbol at(std::size_t i) const noexcept {
        const std::size_t j = head_ + i;
        return buf_[j < buf_.size() ? j : j - buf_.size()];
    }
    bool matches() const noexcept {
        const std::size_t n = buf_.size();
        for (std::size_t i = 0; i < n; ++i)
            if (at(i) != target_[i]) return false;
        return true;
    }
    Symbol last_target() const noexcept { return target_.back(); }

private:
    std::vector<Symbol> buf_;
    std::vector<Symbol> target_;
    std::size_t head_ = 0;
};

template <typename Next>
ReturnRecord scan_cylinder(const Window& w, Next&& next, std::uint64_t budget) {
    Ring ring(w.letters());
    ReturnRecord r;
    r.kind = ReturnKind::Cylinder;
    r.k = w.radius();
    const Symbol last = ring.last_target();
    for (std::uint64_t n = 1; n <= budget; ++n) {
        const Symbol s = next();
        ring.push(s);
        if (s == last && ring.matches()) {
            r.value = n;
            return r;
        }
    }
    r.value = budget;
    r.censored = true;
    return r;
}

void require_recurrent(const MarkovMeasure& m, const LatticeObservable& phi) {
    const auto cov = covariance_matrix(m, phi);  // throws NonzeroDrift
    if (cov.singular) throw Error(ErrorCode::SingularCovariance, "extension returns need an invertible covariance");
}

template <typename BudgetFn>
ExtensionTrace extension_scan(const MarkovMeasure& m, const LatticeObservable& phi, int k, std::uint64_t seed,
                              BudgetFn&& budget_of) {
    LazyPoint point(m, seed);
    const Window w = point.window(k);
    const double log_nu = cylinder_measure(m, w).log_value;
    const std::uint64_t budget = budget_of(log_nu);
    auto cursor = point.cursor();
    Ring ring(w.letters());
    const auto centre = static_cast<std::size_t>(k);
    Symbol prev = w.at(0);
    int sx = 0, sy = 0;
    ExtensionTrace out;
    out.record.kind = ReturnKind::Extension;
    out.record.k = k;
    out.record.seed = seed;
    out.record.log_start_measure = log_nu;
    for (std::uint64_t n = 1; n <= budget; ++n) {
        ring.push(cursor.next());
        const Symbol cur = ring.at(centre);
        const Vec2i& step = phi(prev, cur);
        sx += step.x;
        sy += step.y;
        prev = cur;
        if (sx == 0 && sy == 0) {
            if (out.first_zero == 0) out.first_zero = n;
            if (ring.matches()) {
                out.record.value = n;
                return out;
            }
        }
    }
    out.record.value = budget;
    out.record.censored = true;
    return out;
}

}  // namespace

double ReturnRecord::start_measure() const { return std::exp(log_start_measure); }

void write_records_csv(std::ostream& os, const std::vector<ReturnRecord>& records) {
    os << "kind,k,value,censored,log_start_measure,seed\n";
    char buf[64];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%.17g", r.log_start_measure);
        os << (r.kind == ReturnKind::Cylinder ? "cylinder" : "extension") << ',' << r.k << ',' << r.value << ','
           << (r.censored ? 1 : 0) << ',' << buf << ',' << r.seed << '\n';
    }
}

ReturnRecord cylinder_return_time(const MarkovMeasure& m, int k, std::uint64_t seed, std::uint64_t budget) {
    if (k < 0) throw Error(ErrorCode::InvalidArgument, "k must be nonnegative");
    LazyPoint point(m, derive_seed(seed, kStreamUnconditional, 0));
    const Window w = point.window(k);
    auto cursor = point.cursor();
    ReturnRecord r = scan_cylinder(w, [&] { return cursor.next(); }, budget);
    r.seed = seed;
    r.log_start_measure = cylinder_measure(m, w).log_value;
    return r;
}

ReturnRecord cylinder_return_time(const MarkovMeasure& m, const Window& target, std::uint64_t seed,
                                  std::uint64_t budget) {
    if (!target.is_two_sided()) throw Error(ErrorCode::InvalidArgument, "target must be a two-sided window");
    const auto cm = cylinder_measure(m, target);  // checks admissibility
    // Given the window, the future is the chain started from its last letter.
    Rng rng(derive_seed(seed, kStreamConditional, 0));
    Symbol last = target.letters().back();
    ReturnRecord r = scan_cylinder(
        target,
        [&] {
            last = static_cast<Symbol>(m.forward_sampler(last).sample(rng));
            return last;
        },
        budget);
    r.seed = seed;
    r.log_start_measure = cm.log_value;
    return r;
}

Window non_overlapping_window(const SftSpec& sft, int k) {
    if (k < 0) throw Error(ErrorCode::InvalidArgument, "k must be nonnegative");
    const std::size_t len = static_cast<std::size_t>(2 * k + 1);
    // First letter s0 never reappears, so no proper suffix equals a prefix.
    for (std::size_t s0 = 0; s0 < sft.size(); ++s0) {
        std::vector<Symbol> word{static_cast<Symbol>(s0)};
        std::size_t cycle = 0;
        bool ok = true;
        while (word.size() < len && ok) {
            ok = false;
            for (std::size_t tries = 0; tries < sft.size(); ++tries) {
                const auto c = static_cast<Symbol>((cycle + tries) % sft.size());
                if (c == s0 || !sft.admissible(word.back(), c)) continue;
                word.push_back(c);
                cycle = (c + 1u) % sft.size();
                ok = true;
                break;
            }
        }
        if (ok) return Window::two_sided(std::move(word));
    }
    throw Error(ErrorCode::InvalidArgument, "no non-overlapping admissible window of radius " + std::to_string(k));
}

ReturnRecord extension_return_time(const MarkovMeasure& m, const LatticeObservable& phi, int k,
                                   std::uint64_t seed, std::uint64_t budget) {
    return extension_return_trace(m, phi, k, seed, budget).record;
}

ExtensionTrace extension_return_trace(const MarkovMeasure& m, const LatticeObservable& phi, int k,
                                      std::uint64_t seed, std::uint64_t budget) {
    if (k < 0) throw Error(ErrorCode::InvalidArgument, "k must be nonnegative");
    require_recurrent(m, phi);
    return extension_scan(m, phi, k, seed, [budget](double) { return budget; });
}

double min_log_cylinder_measure(const MarkovMeasure& m, int k) {
    const std::size_t n = m.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> best(n), next(n);
    for (std::size_t a = 0; a < n; ++a) best[a] = std::log(m.stationary()(static_cast<Eigen::Index>(a)));
    for (int step = 0; step < 2 * k; ++step) {
        std::fill(next.begin(), next.end(), inf);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                const double p = m.transition(static_cast<Symbol>(a), static_cast<Symbol>(b));
                if (p > 0.0) next[b] = std::min(next[b], best[a] + std::log(p));
            }
        best.swap(next);
    }
    return *std::min_element(best.begin(), best.end());
}

HirataResult hirata_experiment(const MarkovMeasure& m, int k, const std::optional<Window>& window,
                               std::size_t n_samples, std::uint64_t seed, double budget_factor, unsigned workers) {
    if (window && window->radius() != k) throw Error(ErrorCode::RadiusMismatch, "window radius differs from k");
    if (!(budget_factor > 0.0)) throw Error(ErrorCode::InvalidArgument, "budget factor must be positive");
    HirataResult out;
    out.k = k;
    out.window = window;
    out.records.resize(n_samples);
    double fixed_log_nu = 0.0;
    std::uint64_t fixed_budget = 0;
    if (window) {
        fixed_log_nu = cylinder_measure(m, *window).log_value;
        fixed_budget = static_cast<std::uint64_t>(std::ceil(budget_factor * std::exp(-fixed_log_nu)));
    }
    parallel_for(n_samples, workers, [&](std::size_t i) {
        const std::uint64_t s = derive_seed(seed, kStreamConditional, i);
        if (window) {
            out.records[i] = cylinder_return_time(m, *window, s, fixed_budget);
        } else {
            LazyPoint point(m, derive_seed(s, kStreamUnconditional, 0));
            const Window w = point.window(k);
            const double log_nu = cylinder_measure(m, w).log_value;
            auto cursor = point.cursor();
            const auto budget = static_cast<std::uint64_t>(std::ceil(budget_factor * std::exp(-log_nu)));
            ReturnRecord r = scan_cylinder(w, [&] { return cursor.next(); }, budget);
            r.seed = s;
            r.log_start_measure = log_nu;
            out.records[i] = r;
        }
    });
    out.scaled.reserve(n_samples);
    out.censored.reserve(n_samples);
    for (const auto& r : out.records) {
        out.scaled.push_back(r.start_measure() * static_cast<double>(r.value));
        out.censored.push_back(r.censored);
    }
    out.ks = ks_distance(Ecdf(out.scaled, out.censored), ReferenceCdf::exponential());
    return out;
}

LowerTailResult theorem8_lower_tail(const MarkovMeasure& m, const LatticeObservable& phi, int k,
                                    const std::vector<double>& t_list, std::size_t n_traj, std::uint64_t seed,
                                    double step_ceiling, unsigned workers) {
    if (t_list.empty()) throw Error(ErrorCode::InvalidArgument, "t_list is empty");
    if (!std::is_sorted(t_list.begin(), t_list.end()) || t_list.front() <= 0.0)
        throw Error(ErrorCode::InvalidArgument, "t_list must be positive and ascending");
    require_recurrent(m, phi);
    LowerTailResult out;
    out.k = k;
    out.beta = recurrence_beta(covariance_matrix(m, phi));
    const double t_max = t_list.back();
    const double worst = std::exp(t_max / std::exp(min_log_cylinder_measure(m, k)));
    if (!(worst <= step_ceiling)) {
        const std::uint64_t need = worst >= 1.8e19 ? std::numeric_limits<std::uint64_t>::max()
                                                    : static_cast<std::uint64_t>(std::floor(worst));
        throw BudgetError("per-trajectory budget exp(t_max / min nu(C_k)) = " + std::to_string(worst) +
                              " exceeds the step ceiling",
                          need);
    }
    out.max_budget = static_cast<std::uint64_t>(std::floor(worst));
    out.records.resize(n_traj);
    auto budget_of = [t_max](double log_nu) {
        return static_cast<std::uint64_t>(std::floor(std::exp(t_max / std::exp(log_nu))));
    };
    parallel_for(
        n_traj, workers,
        [&](std::size_t i) {
            out.records[i] = extension_scan(m, phi, k, derive_seed(seed, kStreamTail, i), budget_of).record;
        },
        16);
    std::size_t n_cens = 0;
    for (const auto& r : out.records) n_cens += r.censored ? 1 : 0;
    out.censored_fraction = static_cast<double>(n_cens) / static_cast<double>(n_traj);
    for (double t : t_list) {
        std::size_t hits = 0;
        for (const auto& r : out.records) {
            // Every record's status at t <= t_max is known: censoring happens past exp(t_max / nu).
            if (!r.censored && r.start_measure() * std::log(static_cast<double>(r.value)) <= t) ++hits;
        }
        TailRow row;
        row.t = t;
        row.empirical = static_cast<double>(hits) / static_cast<double>(n_traj);
        row.stderr_ = binomial_stderr(row.empirical, n_traj);
        row.limit = out.beta * t / (1.0 + out.beta * t);
        out.rows.push_back(row);
    }
    return out;
}

ReferenceCdf QMatrixReport::mixture(double beta) const {
    std::vector<double> w, rates;
    for (Eigen::Index i = 0; i < q.rows(); ++i)
        for (Eigen::Index j = 0; j < q.cols(); ++j)
            if (q(i, j) > 0.0) {
                w.push_back(weights(i, j));
                rates.push_back(beta * q(i, j));
            }
    return ReferenceCdf::mixture(std::move(w), std::move(rates));
}

QMatrixReport q_matrix(const MarkovMeasure& m, const std::vector<int>& k_range, std::size_t max_windows,
                       std::uint64_t seed) {
    if (k_range.empty()) throw Error(ErrorCode::InvalidArgument, "k_range is empty");
    const double spread = asymptotic_variance_scalar(m, log_transition_potential(m));
    if (spread > 1e-10)
        throw Error(ErrorCode::NotMaxEntropy,
                    "log pi has asymptotic variance " + std::to_string(spread) + "; not the maximal-entropy measure");
    const auto n = static_cast<Eigen::Index>(m.size());
    QMatrixReport rep;
    rep.dimension = m.dimension();
    rep.q = Eigen::MatrixXd::Zero(n, n);
    rep.weights = m.stationary() * m.stationary().transpose();

    Eigen::MatrixXd adj(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) adj(a, b) = m.sft().admissible(static_cast<Symbol>(a), static_cast<Symbol>(b));
    const PerronData pd = perron_eigen(adj);
    rep.closed_form = pd.value * pd.left * pd.right.transpose();

    Eigen::MatrixXd lo = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::infinity());
    Eigen::MatrixXd hi = Eigen::MatrixXd::Constant(n, n, -std::numeric_limits<double>::infinity());
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd cnt = Eigen::MatrixXd::Zero(n, n);
    auto visit = [&](const Window& w, int k) {
        const double qv = std::exp(cylinder_measure(m, w).log_value + (2.0 * k + 1.0) * rep.dimension / 2.0);
        const Symbol i = w.letters().front(), j = w.letters().back();
        lo(i, j) = std::min(lo(i, j), qv);
        hi(i, j) = std::max(hi(i, j), qv);
        sum(i, j) += qv;
        cnt(i, j) += 1.0;
        ++rep.windows_checked;
    };
    for (int k : k_range) {
        if (k < 0) throw Error(ErrorCode::InvalidArgument, "k must be nonnegative");
        // number of admissible words of length 2k+1
        Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
        for (int s = 0; s < 2 * k; ++s) power = power * adj;
        const double count = power.sum();
        if (count <= static_cast<double>(max_windows)) {
            for (const auto& w : enumerate_windows(m.sft(), k)) visit(w, k);
        } else {
            for (std::size_t s = 0; s < max_windows; ++s) {
                LazyPoint point(m, derive_seed(seed, kStreamQ, s * 1000 + static_cast<std::size_t>(k)));
                visit(point.window(k), k);
            }
        }
    }
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (cnt(i, j) == 0.0) continue;
            rep.q(i, j) = sum(i, j) / cnt(i, j);
            rep.constancy_deviation = std::max(rep.constancy_deviation, (hi(i, j) - lo(i, j)) / rep.q(i, j));
        }
    return rep;
}

}  // namespace recur2d
