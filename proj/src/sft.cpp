#include "recur2d/sft.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "recur2d/error.hpp"

namespace recur2d {

BoolMatrix BoolMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
    BoolMatrix m(rows.size());
    for (std::size_t a = 0; a < rows.size(); ++a) {
        if (rows[a].size() != rows.size())
            throw Error(ErrorCode::InvalidArgument, "transition matrix must be square");
        for (std::size_t b = 0; b < rows.size(); ++b) {
            const int v = rows[a][b];
            if (v != 0 && v != 1)
                throw Error(ErrorCode::InvalidArgument, "transition entries must be 0 or 1");
            m.set(a, b, v == 1);
        }
    }
    return m;
}

bool BoolMatrix::all_positive() const noexcept {
    return std::all_of(cells_.begin(), cells_.end(), [](std::uint8_t c) { return c != 0; });
}

BoolMatrix operator*(const BoolMatrix& x, const BoolMatrix& y) {
    const std::size_t n = x.size();
    BoolMatrix out(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t c = 0; c < n; ++c) {
            if (!x(a, c)) continue;
            for (std::size_t b = 0; b < n; ++b)
                if (y(c, b)) out.set(a, b, true);
        }
    return out;
}

int check_primitive(const BoolMatrix& m) {
    const std::size_t n = m.size();
    if (n == 0) throw Error(ErrorCode::NotPrimitive, "empty matrix");
    const std::size_t bound = (n - 1) * (n - 1) + 1;
    BoolMatrix power = m;
    for (std::size_t k = 1; k <= bound; ++k) {
        if (power.all_positive()) return static_cast<int>(k);
        power = power * m;
    }
    throw Error(ErrorCode::NotPrimitive,
                "no power up to the Wielandt bound " + std::to_string(bound) + " is positive");
}

SftSpec::SftSpec(std::vector<std::string> symbols, BoolMatrix transition)
    : symbols_(std::move(symbols)), transition_(std::move(transition)) {
    const std::size_t n = symbols_.size();
    if (n == 0 || transition_.size() != n)
        throw Error(ErrorCode::InvalidArgument, "alphabet size and transition matrix disagree");
    if (n > 65535) throw Error(ErrorCode::InvalidArgument, "alphabet too large");
    for (std::size_t a = 0; a < n; ++a) {
        bool row = false, col = false;
        for (std::size_t b = 0; b < n; ++b) {
            row = row || transition_(a, b);
            col = col || transition_(b, a);
        }
        if (!row || !col)
            throw Error(ErrorCode::InvalidArgument, "symbol '" + symbols_[a] + "' has an empty row or column");
    }
    n0_ = check_primitive(transition_);
}

SftSpec SftSpec::full_shift(std::vector<std::string> symbols) {
    BoolMatrix m(symbols.size());
    for (std::size_t a = 0; a < symbols.size(); ++a)
        for (std::size_t b = 0; b < symbols.size(); ++b) m.set(a, b, true);
    return SftSpec(std::move(symbols), std::move(m));
}

Symbol SftSpec::index_of(const std::string& name) const {
    const auto it = std::find(symbols_.begin(), symbols_.end(), name);
    if (it == symbols_.end()) throw Error(ErrorCode::InvalidArgument, "unknown symbol '" + name + "'");
    return static_cast<Symbol>(it - symbols_.begin());
}

Window Window::two_sided(std::vector<Symbol> letters) {
    if (letters.size() % 2 == 0)
        throw Error(ErrorCode::InvalidArgument, "two-sided window needs odd length");
    return Window(std::move(letters), true);
}

Window Window::one_sided(std::vector<Symbol> letters) {
    if (letters.empty()) throw Error(ErrorCode::InvalidArgument, "one-sided window needs a letter");
    return Window(std::move(letters), false);
}

bool Window::admissible_in(const SftSpec& sft) const noexcept {
    for (auto s : letters_)
        if (s >= sft.size()) return false;
    for (std::size_t i = 0; i + 1 < letters_.size(); ++i)
        if (!sft.admissible(letters_[i], letters_[i + 1])) return false;
    return true;
}

void Window::require_admissible(const SftSpec& sft) const {
    if (!admissible_in(sft))
        throw Error(ErrorCode::InadmissibleWindow, "window " + to_string(sft) + " is not admissible");
}

std::string Window::to_string(const SftSpec& sft) const {
    std::string out = two_sided_ ? "[" : "<";
    for (std::size_t i = 0; i < letters_.size(); ++i) {
        if (i) out += ' ';
        out += letters_[i] < sft.size() ? sft.symbols()[letters_[i]] : "?";
    }
    out += two_sided_ ? "]" : ">";
    return out;
}

Distance metric_distance(const Window& x, const Window& y) {
    if (!x.is_two_sided() || !y.is_two_sided() || x.radius() != y.radius())
        throw Error(ErrorCode::RadiusMismatch, "metric needs two-sided windows of equal radius");
    const int k = x.radius();
    for (int j = 0; j <= k; ++j) {
        if (x.at(j) != y.at(j) || x.at(-j) != y.at(-j)) return {std::exp(-static_cast<double>(j)), false};
    }
    return {0.0, true};
}

Window cylinder_of(const Window& w, int k) {
    if (!w.is_two_sided() || k < 0 || k > w.radius())
        throw Error(ErrorCode::RadiusMismatch, "cylinder radius exceeds window radius");
    const auto first = w.letters().begin() + (w.radius() - k);
    return Window::two_sided(std::vector<Symbol>(first, first + 2 * k + 1));
}

std::vector<Window> enumerate_windows(const SftSpec& sft, int radius) {
    std::vector<Window> out;
    const std::size_t len = static_cast<std::size_t>(2 * radius + 1);
    std::vector<Symbol> word;
    word.reserve(len);
    std::function<void()> rec = [&] {
        if (word.size() == len) {
            out.push_back(Window::two_sided(word));
            return;
        }
        for (std::size_t s = 0; s < sft.size(); ++s) {
            if (!word.empty() && !sft.admissible(word.back(), static_cast<Symbol>(s))) continue;
            word.push_back(static_cast<Symbol>(s));
            rec();
            word.pop_back();
        }
    };
    rec();
    return out;
}

SftSpec higher_block(const SftSpec& sft, int block, std::vector<std::vector<Symbol>>* words_out) {
    if (block < 1) throw Error(ErrorCode::InvalidArgument, "block length must be positive");
    std::vector<std::vector<Symbol>> words;
    std::vector<Symbol> word;
    std::function<void()> rec = [&] {
        if (static_cast<int>(word.size()) == block) {
            words.push_back(word);
            return;
        }
        for (std::size_t s = 0; s < sft.size(); ++s) {
            if (!word.empty() && !sft.admissible(word.back(), static_cast<Symbol>(s))) continue;
            word.push_back(static_cast<Symbol>(s));
            rec();
            word.pop_back();
        }
    };
    rec();

    std::vector<std::string> names;
    for (const auto& w : words) {
        std::string name;
        for (auto s : w) name += sft.symbols()[s];
        names.push_back(name);
    }
    BoolMatrix m(words.size());
    for (std::size_t u = 0; u < words.size(); ++u)
        for (std::size_t v = 0; v < words.size(); ++v) {
            const bool overlap = std::equal(words[u].begin() + 1, words[u].end(), words[v].begin());
            const bool step = sft.admissible(words[u].back(), words[v].back());
            m.set(u, v, overlap && (block > 1 || step));
        }
    if (words_out) *words_out = words;
    return SftSpec(std::move(names), std::move(m));
}

}  // namespace recur2d
