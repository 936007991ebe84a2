#include <doctest.h>

#include <cmath>
#include <set>

#include "recur2d/parallel.hpp"
#include "recur2d/rng.hpp"

using namespace recur2d;

TEST_CASE("same seed, same stream") {
    Rng a(0), b(0);
    for (int i = 0; i < 10; ++i) CHECK(a() == b());
    Rng c(1);
    CHECK(Rng(0)() != c());
}

TEST_CASE("derived seeds are distinct") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 4; ++s)
        for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, s, i));
    CHECK(seen.size() == 4000);
}

TEST_CASE("uniform and normal moments") {
    Rng rng(9);
    const int n = 200000;
    double s = 0, s2 = 0, z = 0, z2 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        s += u;
        s2 += u * u;
        const double g = rng.normal();
        z += g;
        z2 += g * g;
    }
    CHECK(s / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(s2 / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));
    CHECK(std::abs(z / n) < 0.01);
    CHECK(z2 / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("geometric support and mean") {
    Rng rng(2);
    double total = 0;
    for (int i = 0; i < 100000; ++i) {
        const auto g = rng.geometric(0.25);
        CHECK(g >= 1);
        total += static_cast<double>(g);
    }
    CHECK(total / 100000 == doctest::Approx(4.0).epsilon(0.02));
    CHECK(rng.geometric(1.0) == 1);
}

TEST_CASE("alias table") {
    const std::vector<double> w{1.0, 0.0, 3.0};
    AliasTable t(w);
    Rng rng(3);
    std::vector<int> count(3, 0);
    for (int i = 0; i < 100000; ++i) ++count[t.sample(rng)];
    CHECK(count[1] == 0);
    CHECK(count[2] / 100000.0 == doctest::Approx(0.75).epsilon(0.01));
}

TEST_CASE("parallel_for does not depend on workers") {
    auto run = [](unsigned w) {
        std::vector<double> out(1000);
        parallel_for(out.size(), w, [&](std::size_t i) {
            Rng rng(derive_seed(7, 0, i));
            out[i] = rng.uniform();
        }, 16);
        return out;
    };
    CHECK(run(1) == run(5));
    CHECK_THROWS(parallel_for(100, 3, [](std::size_t i) { if (i == 50) throw std::runtime_error("x"); }, 8));
}
