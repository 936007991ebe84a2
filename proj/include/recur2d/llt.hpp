#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "recur2d/spectral.hpp"

namespace recur2d {

inline constexpr std::uint64_t kDefaultDpBudgetBytes = std::uint64_t{1} << 30;

/// Law of (S_n psi, x_n), optionally conditioned on a starting window.
/// Stored densely on the square |v|_inf <= n * max_norm.
class DisplacementTable {
public:
    int steps() const noexcept { return n_; }
    int radius() const noexcept { return radius_; }
    std::size_t symbols() const noexcept { return symbols_; }

    /// P(S_n = v, x_n = b | start).
    double prob(Vec2i v, Symbol b) const noexcept;
    /// P(S_n = v | start).
    double prob(Vec2i v) const noexcept;
    double mass() const noexcept { return mass_; }

    const std::optional<Window>& start() const noexcept { return start_; }
    /// nu(start), or 1 without conditioning.
    double start_measure() const noexcept { return start_measure_; }
    /// zero_series()[t] = P(S_t = 0 | start) for t = 0..n.
    const std::vector<double>& zero_series() const noexcept { return zero_series_; }

    /// Nonzero entries as "v1,v2,end_symbol,probability".
    void write_csv(std::ostream& os, const SftSpec& sft) const;

private:
    friend DisplacementTable displacement_distribution(const MarkovMeasure&, const LatticeObservable&, int,
                                                       const std::optional<Window>&, std::uint64_t);
    int n_ = 0;
    int radius_ = 0;
    std::size_t symbols_ = 0;
    std::vector<double> data_;  // [symbol][y][x]
    double mass_ = 0.0;
    std::optional<Window> start_;
    double start_measure_ = 1.0;
    std::vector<double> zero_series_;
};

/// Bytes the DP needs for n steps (two dense buffers).
std::uint64_t dp_bytes_required(const MarkovMeasure& m, const LatticeObservable& phi, int n);

/// Exact forward DP over (symbol, displacement). `start` is a two-sided window
/// (coordinates -q..q, q <= n) or a one-sided window (0..L-1, L <= n+1).
/// Throws BudgetExceeded (carrying the bytes needed) or InadmissibleWindow.
DisplacementTable displacement_distribution(const MarkovMeasure& m, const LatticeObservable& phi, int n,
                                            const std::optional<Window>& start = std::nullopt,
                                            std::uint64_t budget_bytes = kDefaultDpBudgetBytes);

struct LltCheck {
    int n = 0;
    int k = 0;
    double nu_a = 1.0;      // nu(A)
    double nu_b = 1.0;      // one-sided measure of B
    double exact = 0.0;     // nu(A and S_n = 0 and (x_{n-k}, ...) in B)
    double main_term = 0.0; // nu(A) nu(B) / (2 pi (n-k) sqrt(det sigma))
    double abs_error = 0.0;
    double ratio = 0.0;                // exact / main_term
    double relative_deviation = 0.0;   // |ratio - 1|
    double scaled_error = 0.0;         // abs_error (n-k)^{3/2} / nu(B)
};

/// Doubly conditioned local limit check. A is a two-sided window at
/// coordinates -q..q (or none for the whole space), B a one-sided window
/// matched against x_{n-k}, x_{n-k+1}, ... (or none).
LltCheck llt_conditional_check(const MarkovMeasure& m, const LatticeObservable& phi, const std::optional<Window>& a,
                               const std::optional<Window>& b, int n, int k,
                               std::uint64_t budget_bytes = kDefaultDpBudgetBytes);

}  // namespace recur2d
