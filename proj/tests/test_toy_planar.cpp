#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "recur2d/error.hpp"
#include "recur2d/planar.hpp"
#include "recur2d/toy.hpp"

using namespace recur2d;

TEST_CASE("simple walk first returns") {
    // f_2 = 1/4, f_4 = P_4 - f_2 P_2 = 36/256 - 1/16 = 5/64
    Rng rng(123);
    const int n = 200000;
    int two = 0, four = 0, odd = 0;
    for (int i = 0; i < n; ++i) {
        const auto r = srw_first_return(rng, 1000);
        two += r == 2;
        four += r == 4;
        odd += (r % 2) == 1;
    }
    CHECK(odd == 0);
    CHECK(std::abs(two / double(n) - 0.25) < 5 * std::sqrt(0.25 * 0.75 / n));
    CHECK(std::abs(four / double(n) - 5.0 / 64.0) < 5 * std::sqrt(0.078 * 0.922 / n));
}

TEST_CASE("sampler tail models") {
    // 3 of 4 returns censored at cap e^6
    const std::uint64_t cap = 403;  // floor(e^6)
    const auto s = HeavyTailReturnSampler::from_parts(cap, {std::log(2.0)}, 4, 9);
    CHECK(s.censored_fraction() == doctest::Approx(0.75));
    const double c = std::numbers::pi / 0.75 - std::log(double(cap));
    CHECK(s.tail_shift() == doctest::Approx(c));
    CHECK(s.survival(1e8) == doctest::Approx(std::numbers::pi / (std::log(1e8) + c)));
    CHECK(s.survival(double(cap)) == doctest::Approx(0.75));
    CHECK(s.empirical_survival(1.5) == doctest::Approx(1.0));
    CHECK(s.empirical_survival(3.0) == doctest::Approx(0.75));

    const auto lit = HeavyTailReturnSampler::from_parts(cap, {std::log(2.0)}, 4, 9, HeavyTailReturnSampler::Tail::Literal);
    CHECK(lit.survival(1e8) == doctest::Approx(0.75 * std::log(double(cap)) / std::log(1e8)));
}

TEST_CASE("sampler draws follow the tail") {
    const auto s = HeavyTailReturnSampler::from_parts(1000, {std::log(2.0)}, 2, 1);
    Rng rng(4);
    const int n = 100000;
    int above = 0;
    for (int i = 0; i < n; ++i) above += s.draw_log(rng) > std::log(1e6);
    CHECK(std::abs(above / double(n) - s.survival(1e6)) < 0.01);
}

TEST_CASE("sampler round trip") {
    const auto s = HeavyTailReturnSampler::build(1000, 3000, 77, 2);
    std::stringstream ss;
    s.write(ss);
    const auto t = HeavyTailReturnSampler::read(ss);
    CHECK(t.cap() == s.cap());
    CHECK(t.total() == s.total());
    CHECK(t.log_values() == s.log_values());
    CHECK(t.tail_shift() == s.tail_shift());
    std::stringstream bad("not a sampler\n");
    CHECK_THROWS_AS(HeavyTailReturnSampler::read(bad), Error);
    CHECK_THROWS_AS(HeavyTailReturnSampler::build(999, 10, 1), Error);
}

TEST_CASE("sampler build ignores the worker count") {
    const auto a = HeavyTailReturnSampler::build(1000, 2000, 5, 1);
    const auto b = HeavyTailReturnSampler::build(1000, 2000, 5, 4);
    CHECK(a.log_values() == b.log_values());
}

TEST_CASE("log sum exp") {
    CHECK(log_sum_exp({1000.0, 1000.0}) == doctest::Approx(1000.0 + std::log(2.0)));
    CHECK(log_sum_exp({-1000.0, 0.0}) == doctest::Approx(0.0));
}

TEST_CASE("loglog medians of return sums drift toward 1") {
    const auto s = HeavyTailReturnSampler::build(10000, 20000, 3, 1);
    const auto rows = lemma3_median_check({100, 10000}, 2000, s, 8, 1);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].median > rows[1].median);
    CHECK(rows[1].median > 1.0);
}

TEST_CASE("toy tau is reproducible") {
    const auto s = HeavyTailReturnSampler::build(1000, 2000, 3, 1);
    const auto a = toy_tau_cdf(0.01, {1.0, 10.0}, 500, s, 4, 1);
    const auto b = toy_tau_cdf(0.01, {1.0, 10.0}, 500, s, 4, 3);
    CHECK(a.scaled == b.scaled);
    CHECK(a.rows[1].limit == doctest::Approx(10.0 / (10.0 + std::numbers::pi)));
}

TEST_CASE("toy verification rejects large balls") {
    CHECK_THROWS_AS(toy_direct_vs_decomposed(0.5, 10, 1, 100), Error);
}

TEST_CASE("gaussian ball probability") {
    CHECK(gaussian_ball_probability(0.0, 0.5, 1.0) == doctest::Approx(1.0 - std::exp(-0.125)).epsilon(1e-12));
    // far away: tiny
    CHECK(gaussian_ball_probability(20.0, 0.1, 1.0) < 1e-80);
    // small ball: density times area
    const double d = 1.3, eps = 1e-3;
    CHECK(gaussian_ball_probability(d, eps, 1.0) ==
          doctest::Approx(std::exp(-d * d / 2) / (2 * std::numbers::pi) * std::numbers::pi * eps * eps).epsilon(1e-5));
}

TEST_CASE("disc intersection") {
    CHECK(disc_intersection_area(1.0, 1.0, 0.0) == doctest::Approx(std::numbers::pi));
    CHECK(disc_intersection_area(1.0, 1.0, 2.5) == 0.0);
    CHECK(disc_intersection_area(2.0, 0.5, 0.3) == doctest::Approx(std::numbers::pi * 0.25));
    // lens of two unit discs at distance 1: 2 pi / 3 - sqrt(3) / 2
    CHECK(disc_intersection_area(1.0, 1.0, 1.0) == doctest::Approx(2 * std::numbers::pi / 3 - std::sqrt(3.0) / 2));
}

TEST_CASE("planar laws") {
    const auto g = PlanarWalkLaw::gaussian(2.0);
    CHECK(g.covariance()[0][0] == 4.0);
    CHECK(PlanarWalkLaw::uniform_disc(2.0).covariance()[1][1] == doctest::Approx(1.0));
    CHECK_FALSE(PlanarWalkLaw::lattice_simple().cramer_ok());
    CHECK_THROWS_AS(PlanarWalkLaw::by_name("cauchy"), Error);
    // uniform disc: the ball probability is an area ratio
    const auto u = PlanarWalkLaw::uniform_disc(1.0);
    CHECK(u.ball_probability({0.0, 0.0}, 0.5) == doctest::Approx(0.25));
}

TEST_CASE("planar probabilities, exact gaussian cells") {
    const auto r = planar_return_prob(PlanarWalkLaw::gaussian(1.0), {10, 20, 40}, {0.1, 0.2, 0.4}, 20000, 5, 2);
    for (const auto& c : r.cells) {
        REQUIRE(c.exact > 0.0);
        CHECK(std::abs(c.p - c.exact) < 5 * c.stderr_ + 1e-12);
    }
    for (double s : r.slope_n) CHECK(s == doctest::Approx(-1.0).epsilon(0.05));
}

TEST_CASE("planar tau trend is reproducible and ordered") {
    const auto law = PlanarWalkLaw::gaussian(1.0);
    const auto a = planar_tau_trend(law, {1.0, 0.6}, 200, 100000, 3, 1);
    const auto b = planar_tau_trend(law, {1.0, 0.6}, 200, 100000, 3, 4);
    CHECK(a[1].median_tau == b[1].median_tau);
    CHECK(a[1].median_tau > a[0].median_tau);
    CHECK(std::isnan(a[0].median_ratio));
}
