#include "recur2d/llt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <ostream>

#include "recur2d/error.hpp"

namespace recur2d {

namespace {

/// Dense forward sweep over (symbol, displacement). Displacements live on a
/// fixed square of radius R; only the reachable square of radius r is touched.
class LatticeDp {
public:
    LatticeDp(const MarkovMeasure& m, const LatticeObservable& phi, int max_radius)
        : m_(m), phi_(phi), n_sym_(m.size()), big_r_(max_radius), side_(2 * max_radius + 1),
          cells_(static_cast<std::size_t>(side_) * static_cast<std::size_t>(side_)),
          cur_(n_sym_ * cells_, 0.0), next_(n_sym_ * cells_, 0.0) {
        for (std::size_t a = 0; a < n_sym_; ++a)
            for (std::size_t b = 0; b < n_sym_; ++b) {
                const double w = m.stochastic()(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
                if (w > 0.0) moves_.push_back({static_cast<Symbol>(a), static_cast<Symbol>(b), w,
                                               phi(static_cast<Symbol>(a), static_cast<Symbol>(b))});
            }
    }

    void init(const std::vector<double>& symbol_mass) {
        std::fill(cur_.begin(), cur_.end(), 0.0);
        r_ = 0;
        for (std::size_t a = 0; a < n_sym_; ++a) cell(cur_, a, 0, 0) = symbol_mass[a];
    }

    /// Keeps only mass on symbol `allowed`.
    void restrict(Symbol allowed) {
        for (std::size_t a = 0; a < n_sym_; ++a) {
            if (a == allowed) continue;
            for (int y = -r_; y <= r_; ++y) std::fill_n(&cell(cur_, a, y, -r_), 2 * r_ + 1, 0.0);
        }
    }

    void step(bool accumulate) {
        const int r_new = accumulate ? std::min(big_r_, r_ + phi_.max_norm()) : r_;
        const int width = 2 * r_new + 1;
        for (int y = -r_new; y <= r_new; ++y) {
            for (std::size_t b = 0; b < n_sym_; ++b) std::fill_n(&cell(next_, b, y, -r_new), width, 0.0);
            for (const auto& mv : moves_) {
                const int dx = accumulate ? mv.step.x : 0;
                const int dy = accumulate ? mv.step.y : 0;
                const int ys = y - dy;
                if (ys < -r_ || ys > r_) continue;
                // Target x in [-r_new, r_new] with source x - dx in [-r_, r_].
                const int x_lo = std::max(-r_new, -r_ + dx);
                const int x_hi = std::min(r_new, r_ + dx);
                if (x_lo > x_hi) continue;
                double* out = &cell(next_, mv.to, y, x_lo);
                const double* src = &cell(cur_, mv.from, ys, x_lo - dx);
                const double w = mv.weight;
                const int len = x_hi - x_lo + 1;
                for (int i = 0; i < len; ++i) out[i] += w * src[i];
            }
        }
        r_ = r_new;
        std::swap(cur_, next_);
    }

    double prob(Vec2i v, std::size_t b) const {
        if (std::abs(v.x) > r_ || std::abs(v.y) > r_) return 0.0;
        return cur_[b * cells_ + index(v.y, v.x)];
    }

    double total() const {
        double s = 0.0;
        for (std::size_t a = 0; a < n_sym_; ++a)
            for (int y = -r_; y <= r_; ++y)
                for (int x = -r_; x <= r_; ++x) s += cur_[a * cells_ + index(y, x)];
        return s;
    }

    int radius() const noexcept { return r_; }
    std::vector<double> take() { return std::move(cur_); }

private:
    struct Move {
        Symbol from;
        Symbol to;
        double weight;
        Vec2i step;
    };

    std::size_t index(int y, int x) const noexcept {
        return static_cast<std::size_t>(y + big_r_) * static_cast<std::size_t>(side_) +
               static_cast<std::size_t>(x + big_r_);
    }
    double& cell(std::vector<double>& buf, std::size_t a, int y, int x) noexcept {
        return buf[a * cells_ + index(y, x)];
    }

    const MarkovMeasure& m_;
    const LatticeObservable& phi_;
    std::size_t n_sym_;
    int big_r_;
    int side_;
    std::size_t cells_;
    std::vector<double> cur_;
    std::vector<double> next_;
    std::vector<Move> moves_;
    int r_ = 0;
};

struct DpRun {
    std::vector<double> data;
    int radius = 0;
    std::vector<double> zero_series;  // joint P(S_t = 0, constraints so far), t = 0..n
};

/// Runs from the earliest constrained time (or 0) to max(n, last constraint).
/// Transitions t -> t+1 add psi(x_t, x_{t+1}) only for 0 <= t < n.
DpRun run_constrained(const MarkovMeasure& m, const LatticeObservable& phi, int n,
                      const std::map<std::int64_t, Symbol>& constraints, std::uint64_t budget_bytes) {
    const std::uint64_t need = dp_bytes_required(m, phi, n);
    if (need > budget_bytes)
        throw BudgetError("displacement DP for n = " + std::to_string(n) + " needs " + std::to_string(need) +
                              " bytes, budget is " + std::to_string(budget_bytes),
                          need);

    const std::int64_t t_begin = constraints.empty() ? 0 : std::min<std::int64_t>(0, constraints.begin()->first);
    const std::int64_t t_end = constraints.empty() ? n : std::max<std::int64_t>(n, constraints.rbegin()->first);

    LatticeDp dp(m, phi, n * phi.max_norm());
    std::vector<double> init(m.size());
    for (std::size_t a = 0; a < m.size(); ++a) init[a] = m.stationary()(static_cast<Eigen::Index>(a));
    dp.init(init);
    auto apply = [&](std::int64_t t) {
        if (auto it = constraints.find(t); it != constraints.end()) dp.restrict(it->second);
    };
    apply(t_begin);

    DpRun run;
    run.zero_series.assign(static_cast<std::size_t>(n) + 1, 0.0);
    auto zero_mass = [&] {
        double s = 0.0;
        for (std::size_t b = 0; b < m.size(); ++b) s += dp.prob({0, 0}, b);
        return s;
    };
    if (t_begin == 0) run.zero_series[0] = zero_mass();
    for (std::int64_t t = t_begin; t < t_end; ++t) {
        dp.step(t >= 0 && t < n);
        apply(t + 1);
        if (t + 1 == 0) run.zero_series[0] = zero_mass();
        if (t + 1 >= 1 && t + 1 <= n) run.zero_series[static_cast<std::size_t>(t + 1)] = zero_mass();
    }
    run.radius = dp.radius();
    run.data = dp.take();
    return run;
}

}  // namespace

double DisplacementTable::prob(Vec2i v, Symbol b) const noexcept {
    if (std::abs(v.x) > radius_ || std::abs(v.y) > radius_ || b >= symbols_) return 0.0;
    const auto side = static_cast<std::size_t>(2 * radius_ + 1);
    return data_[b * side * side + static_cast<std::size_t>(v.y + radius_) * side + static_cast<std::size_t>(v.x + radius_)];
}

double DisplacementTable::prob(Vec2i v) const noexcept {
    double s = 0.0;
    for (std::size_t b = 0; b < symbols_; ++b) s += prob(v, static_cast<Symbol>(b));
    return s;
}

void DisplacementTable::write_csv(std::ostream& os, const SftSpec& sft) const {
    os << "v1,v2,end_symbol,probability\n";
    char buf[64];
    for (int x = -radius_; x <= radius_; ++x)
        for (int y = -radius_; y <= radius_; ++y)
            for (std::size_t b = 0; b < symbols_; ++b) {
                const double p = prob({x, y}, static_cast<Symbol>(b));
                if (p == 0.0) continue;
                std::snprintf(buf, sizeof buf, "%.17g", p);
                os << x << ',' << y << ',' << sft.symbols()[b] << ',' << buf << '\n';
            }
}

std::uint64_t dp_bytes_required(const MarkovMeasure& m, const LatticeObservable& phi, int n) {
    const std::uint64_t side = 2 * static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(phi.max_norm()) + 1;
    return 2 * m.size() * side * side * sizeof(double);
}

DisplacementTable displacement_distribution(const MarkovMeasure& m, const LatticeObservable& phi, int n,
                                            const std::optional<Window>& start, std::uint64_t budget_bytes) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "displacement DP needs n >= 1");
    if (phi.size() != m.size()) throw Error(ErrorCode::InvalidArgument, "observable and measure alphabets differ");

    std::map<std::int64_t, Symbol> constraints;
    double start_measure = 1.0;
    if (start) {
        start->require_admissible(m.sft());
        const std::int64_t first = start->is_two_sided() ? -start->radius() : 0;
        const std::int64_t last = first + static_cast<std::int64_t>(start->length()) - 1;
        if (last > n) throw Error(ErrorCode::InvalidArgument, "start window reaches past time n");
        for (std::size_t i = 0; i < start->length(); ++i)
            constraints[first + static_cast<std::int64_t>(i)] = start->letters()[i];
        start_measure = cylinder_measure(m, *start).value;
    }
    DpRun run = run_constrained(m, phi, n, constraints, budget_bytes);

    DisplacementTable table;
    table.n_ = n;
    table.radius_ = n * phi.max_norm();
    table.symbols_ = m.size();
    table.data_ = std::move(run.data);
    for (double& v : table.data_) v /= start_measure;
    for (double& v : run.zero_series) v /= start_measure;
    table.zero_series_ = std::move(run.zero_series);
    table.start_ = start;
    table.start_measure_ = start_measure;
    double mass = 0.0;
    for (double v : table.data_) mass += v;
    table.mass_ = mass;
    return table;
}

LltCheck llt_conditional_check(const MarkovMeasure& m, const LatticeObservable& phi, const std::optional<Window>& a,
                               const std::optional<Window>& b, int n, int k, std::uint64_t budget_bytes) {
    if (!(n > k && k >= 0)) throw Error(ErrorCode::InvalidArgument, "llt check needs n > k >= 0");
    std::map<std::int64_t, Symbol> constraints;
    LltCheck out;
    out.n = n;
    out.k = k;
    if (a) {
        if (!a->is_two_sided()) throw Error(ErrorCode::InvalidArgument, "A must be a two-sided cylinder");
        a->require_admissible(m.sft());
        for (int i = -a->radius(); i <= a->radius(); ++i) constraints[i] = a->at(i);
        out.nu_a = cylinder_measure(m, *a).value;
    }
    if (b) {
        if (b->is_two_sided()) throw Error(ErrorCode::InvalidArgument, "B must be a one-sided cylinder");
        b->require_admissible(m.sft());
        for (std::size_t i = 0; i < b->length(); ++i) {
            constraints.emplace(n - k + static_cast<std::int64_t>(i), b->letters()[i]);
        }
        out.nu_b = cylinder_measure(m, *b).value;
    }
    // Overlapping A and B with different letters: the event is empty.
    bool conflict = false;
    if (a && b)
        for (std::size_t i = 0; i < b->length(); ++i) {
            const std::int64_t t = n - k + static_cast<std::int64_t>(i);
            if (t >= -a->radius() && t <= a->radius() && a->at(static_cast<int>(t)) != b->letters()[i]) conflict = true;
        }

    const auto cov = covariance_matrix(m, phi);
    const double beta = recurrence_beta(cov);
    out.main_term = out.nu_a * out.nu_b * beta / static_cast<double>(n - k);
    if (!conflict) {
        DpRun run = run_constrained(m, phi, n, constraints, budget_bytes);
        const int radius = n * phi.max_norm();
        const auto side = static_cast<std::size_t>(2 * radius + 1);
        const std::size_t centre = static_cast<std::size_t>(radius) * side + static_cast<std::size_t>(radius);
        double exact = 0.0;
        for (std::size_t s = 0; s < m.size(); ++s) exact += run.data[s * side * side + centre];
        out.exact = exact;
    }
    out.abs_error = std::abs(out.exact - out.main_term);
    out.ratio = out.exact / out.main_term;
    out.relative_deviation = std::abs(out.ratio - 1.0);
    out.scaled_error = out.abs_error * std::pow(static_cast<double>(n - k), 1.5) / out.nu_b;
    return out;
}

}  // namespace recur2d
