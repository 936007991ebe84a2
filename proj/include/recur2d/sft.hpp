#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace recur2d {

using Symbol = std::uint16_t;

/// Square 0-1 matrix stored row-major.
class BoolMatrix {
public:
    BoolMatrix() = default;
    explicit BoolMatrix(std::size_t n) : n_(n), cells_(n * n, 0) {}
    static BoolMatrix from_rows(const std::vector<std::vector<int>>& rows);

    std::size_t size() const noexcept { return n_; }
    bool operator()(std::size_t a, std::size_t b) const noexcept { return cells_[a * n_ + b] != 0; }
    void set(std::size_t a, std::size_t b, bool v) noexcept { cells_[a * n_ + b] = v ? 1 : 0; }
    bool all_positive() const noexcept;

    friend BoolMatrix operator*(const BoolMatrix& x, const BoolMatrix& y);
    friend bool operator==(const BoolMatrix&, const BoolMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::uint8_t> cells_;
};

/// Smallest n0 <= (size-1)^2 + 1 with M^n0 > 0 entrywise (Boolean semiring).
/// Throws NotPrimitive otherwise.
int check_primitive(const BoolMatrix& m);

/// A primitive subshift of finite type: alphabet plus admissible transitions.
class SftSpec {
public:
    /// Validates 0-1 entries, nonempty rows/columns and primitivity.
    SftSpec(std::vector<std::string> symbols, BoolMatrix transition);

    static SftSpec full_shift(std::vector<std::string> symbols);

    std::size_t size() const noexcept { return symbols_.size(); }
    const std::vector<std::string>& symbols() const noexcept { return symbols_; }
    const BoolMatrix& transition() const noexcept { return transition_; }
    bool admissible(Symbol a, Symbol b) const noexcept { return transition_(a, b); }
    int primitivity_exponent() const noexcept { return n0_; }

    /// Index of a symbol by name; throws InvalidArgument when unknown.
    Symbol index_of(const std::string& name) const;

private:
    std::vector<std::string> symbols_;
    BoolMatrix transition_;
    int n0_ = 1;
};

/// Finite piece of a point of the shift. Two-sided windows hold indices
/// -k..k (length 2k+1); one-sided windows hold 0..q-1.
class Window {
public:
    static Window two_sided(std::vector<Symbol> letters);
    static Window one_sided(std::vector<Symbol> letters);

    bool is_two_sided() const noexcept { return two_sided_; }
    /// k for two-sided windows.
    int radius() const noexcept { return two_sided_ ? static_cast<int>(letters_.size() / 2) : 0; }
    std::size_t length() const noexcept { return letters_.size(); }
    const std::vector<Symbol>& letters() const noexcept { return letters_; }

    /// Letter at coordinate i (-k..k for two-sided, 0..q-1 for one-sided).
    Symbol at(int i) const { return letters_.at(static_cast<std::size_t>(i + radius())); }

    bool admissible_in(const SftSpec& sft) const noexcept;
    /// Throws InadmissibleWindow if some adjacent pair is forbidden.
    void require_admissible(const SftSpec& sft) const;

    std::string to_string(const SftSpec& sft) const;

    friend bool operator==(const Window&, const Window&) = default;

private:
    Window(std::vector<Symbol> letters, bool two_sided)
        : letters_(std::move(letters)), two_sided_(two_sided) {}

    std::vector<Symbol> letters_;
    bool two_sided_ = true;
};

struct Distance {
    double value = 0.0;
    /// Set when the windows agree on every stored coordinate: the true
    /// distance is below e^{-(k+1)} and 0 is reported.
    bool radius_limited = false;
};

/// d(x, y) = e^{-m}, m the largest integer with x_i = y_i for all |i| < m.
Distance metric_distance(const Window& x, const Window& y);

/// Central sub-window of radius k: the cylinder C_k(x) = {y : y_i = x_i, |i| <= k}.
Window cylinder_of(const Window& w, int k);

/// Every admissible two-sided window of radius k (use for small alphabets/k).
std::vector<Window> enumerate_windows(const SftSpec& sft, int radius);

/// Higher-block presentation: symbols are admissible words of length `block`,
/// and u -> v is allowed when v extends the overlap of u by one letter.
SftSpec higher_block(const SftSpec& sft, int block, std::vector<std::vector<Symbol>>* words = nullptr);

}  // namespace recur2d
