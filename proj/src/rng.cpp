#include "recur2d/rng.hpp"

#include <algorithm>
#include <numeric>

#include "recur2d/error.hpp"

namespace recur2d {

AliasTable::AliasTable(std::span<const double> weights) {
    const std::size_t n = weights.size();
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "alias table needs at least one weight");
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) throw Error(ErrorCode::InvalidArgument, "alias table weights sum to zero");

    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = weights[i] * static_cast<double>(n) / total;

    threshold_.assign(n, 0);
    alias_.assign(n, 0);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i) (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));

    constexpr double kScale = 4294967296.0;  // 2^32
    while (!small.empty() && !large.empty()) {
        const auto s = small.back();
        small.pop_back();
        const auto l = large.back();
        threshold_[s] = static_cast<std::uint64_t>(scaled[s] * kScale);
        alias_[s] = l;
        scaled[l] -= 1.0 - scaled[s];
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    // Leftovers are 1 up to rounding.
    for (auto i : large) {
        threshold_[i] = static_cast<std::uint64_t>(kScale);
        alias_[i] = i;
    }
    const auto heaviest = static_cast<std::uint32_t>(
        std::max_element(weights.begin(), weights.end()) - weights.begin());
    for (auto i : small) {
        const bool keep = scaled[i] > 0.5;
        threshold_[i] = keep ? static_cast<std::uint64_t>(kScale) : 0;
        alias_[i] = keep ? i : heaviest;
    }
}

}  // namespace recur2d
