#include "recur2d/systems.hpp"

#include "recur2d/error.hpp"

namespace recur2d::systems {

namespace {

const std::vector<Vec2i> kCompass{{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

System make(std::string name, SftSpec sft, PairPotential h, std::optional<std::vector<Vec2i>> steps) {
    MarkovMeasure m = gibbs_from_potential(sft, h);
    std::optional<LatticeObservable> phi;
    if (steps) phi = LatticeObservable::from_symbol_values(sft, *steps);
    return {std::move(name), std::move(h), std::move(m), std::move(phi)};
}

}  // namespace

System lazy5() {
    auto sft = SftSpec::full_shift({"E", "N", "W", "S", "R"});
    auto steps = kCompass;
    steps.push_back({0, 0});
    auto h = PairPotential::zero(sft);
    return make("lazy5", std::move(sft), std::move(h), steps);
}

System lazy5_biased() {
    auto sft = SftSpec::full_shift({"E", "N", "W", "S", "R"});
    auto steps = kCompass;
    steps.push_back({1, 0});
    auto h = PairPotential::zero(sft);
    return make("lazy5_biased", std::move(sft), std::move(h), steps);
}

System srw4() {
    auto sft = SftSpec::full_shift({"E", "N", "W", "S"});
    auto h = PairPotential::zero(sft);
    return make("srw4", std::move(sft), std::move(h), kCompass);
}

System markov5() {
    auto sft = SftSpec::full_shift({"E", "N", "W", "S", "R"});
    enum : Symbol { E, N, W, S, R };
    auto mirror = [](Symbol s) -> Symbol {
        switch (s) {
            case E: return W;
            case W: return E;
            case N: return S;
            case S: return N;
            default: return R;
        }
    };
    auto base = [](Symbol a, Symbol b) -> double {
        if (a == b) return (a == E || a == W) ? 0.8 : (a == R ? 0.3 : 0.4);
        if (a == R) return -0.1;
        if (b == R) return 0.2;
        if ((a == E && b == W) || (a == W && b == E) || (a == N && b == S) || (a == S && b == N)) return -0.7;
        if ((a == E && b == N) || (a == W && b == S)) return 0.3;
        return 0.0;
    };
    // Average over the involution so the invariance holds by construction.
    auto h = PairPotential::from_function(sft, [&](Symbol a, Symbol b) {
        return 0.5 * (base(a, b) + base(mirror(a), mirror(b)));
    });
    auto steps = kCompass;
    steps.push_back({0, 0});
    return make("markov5", std::move(sft), std::move(h), steps);
}

System golden_mean() {
    SftSpec sft({"0", "1"}, BoolMatrix::from_rows({{1, 1}, {1, 0}}));
    auto h = PairPotential::zero(sft);
    return make("golden_mean", std::move(sft), std::move(h), std::nullopt);
}

System full_shift(int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "full shift needs at least one symbol");
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back(std::to_string(i));
    auto sft = SftSpec::full_shift(std::move(names));
    auto h = PairPotential::zero(sft);
    return make("full" + std::to_string(n), std::move(sft), std::move(h), std::nullopt);
}

System by_name(const std::string& name) {
    if (name == "lazy5") return lazy5();
    if (name == "lazy5_biased") return lazy5_biased();
    if (name == "srw4") return srw4();
    if (name == "markov5") return markov5();
    if (name == "golden_mean") return golden_mean();
    if (name.rfind("full", 0) == 0 && name.size() > 4) return full_shift(std::stoi(name.substr(4)));
    throw Error(ErrorCode::InvalidArgument, "unknown system '" + name + "'");
}

}  // namespace recur2d::systems
