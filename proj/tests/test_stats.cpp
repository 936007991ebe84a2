#include <doctest.h>

#include <cmath>
#include <numbers>

#include "recur2d/error.hpp"
#include "recur2d/stats.hpp"

using namespace recur2d;

TEST_CASE("ecdf without censoring") {
    const Ecdf e({3.0, 1.0, 2.0, 2.0});
    CHECK(e(0.5) == 0.0);
    CHECK(e(2.0) == doctest::Approx(0.75));
    CHECK(e(10.0) == 1.0);
    CHECK(std::isinf(e.censor_floor()));
}

TEST_CASE("ecdf with censoring") {
    // observed 1, 2; censored at 1.5 and 4
    const Ecdf e({1.0, 1.5, 2.0, 4.0}, {false, true, false, true});
    CHECK(e.censor_floor() == 1.5);
    CHECK(e(1.0) == doctest::Approx(0.25));
    CHECK(e.coverage(1.0) == 1.0);
    // at t = 3 the entry censored at 1.5 is unknown
    CHECK(e(3.0) == doctest::Approx(2.0 / 3.0));
    CHECK(e.coverage(3.0) == doctest::Approx(0.75));
}

TEST_CASE("ks distance of exact quantiles") {
    const int n = 200;
    std::vector<double> xs;
    for (int i = 1; i <= n; ++i) xs.push_back(-std::log(1.0 - (i - 0.5) / n));
    const auto r = ks_distance(Ecdf(xs), ReferenceCdf::exponential());
    CHECK(r.distance == doctest::Approx(0.5 / n).epsilon(1e-9));
    CHECK(r.used == static_cast<std::size_t>(n));
}

TEST_CASE("ks below the censoring floor") {
    std::vector<double> xs{0.1, 0.2, 5.0, 5.0};
    const auto r = ks_distance(Ecdf(xs, {false, false, true, true}), ReferenceCdf::exponential());
    CHECK(r.used == 2);
    CHECK(r.coverage == doctest::Approx(0.5));
    CHECK_THROWS_AS(ks_distance(Ecdf({1.0}, {true}), ReferenceCdf::exponential()), Error);
}

TEST_CASE("two-sample ks") {
    CHECK(ks_two_sample(Ecdf({1.0, 2.0, 3.0}), Ecdf({1.0, 2.0, 3.0})) == 0.0);
    CHECK(ks_two_sample(Ecdf({1.0, 2.0}), Ecdf({3.0, 4.0})) == 1.0);
    // censored entries sit above everything
    CHECK(ks_two_sample(Ecdf({1.0, 9.0}, {false, true}), Ecdf({1.0, 100.0})) == doctest::Approx(0.5));
}

TEST_CASE("reference laws") {
    CHECK(ReferenceCdf::toy()(std::numbers::pi) == doctest::Approx(0.5));
    CHECK(ReferenceCdf::toy()(10.0) == doctest::Approx(0.7610).epsilon(1e-4));
    const double beta = 5.0 / (4.0 * std::numbers::pi);
    CHECK(ReferenceCdf::recurrence(beta)(0.02) == doctest::Approx(0.00792).epsilon(1e-3));
    CHECK(ReferenceCdf::recurrence(beta)(0.1) == doctest::Approx(0.03827).epsilon(1e-3));
    CHECK(ReferenceCdf::normal(4.0)(0.0) == doctest::Approx(0.5));
    CHECK(ReferenceCdf::normal(4.0)(2.0) == doctest::Approx(0.841344746).epsilon(1e-8));
    const auto mix = ReferenceCdf::mixture({0.25, 0.75}, {1.0, 3.0});
    CHECK(mix(1.0) == doctest::Approx(0.25 * 0.5 + 0.75 * 0.75));
}

TEST_CASE("regression") {
    const auto r = slope_regression({1, 2, 3, 4}, {3, 5, 7, 9});
    CHECK(r.slope == doctest::Approx(2.0));
    CHECK(r.intercept == doctest::Approx(1.0));
    CHECK(r.slope_stderr == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(slope_regression({1, 1, 1}, {1, 2, 3}), Error);
    CHECK_THROWS_AS(slope_regression({1, 2}, {1, 2}), Error);
}

TEST_CASE("quantiles and moments") {
    CHECK(median({4.0, 1.0, 3.0, 2.0}) == doctest::Approx(2.5));
    CHECK(quantile({1.0, 2.0, INFINITY}, 0.5) == 2.0);
    CHECK(std::isinf(quantile({1.0, INFINITY, INFINITY}, 0.5)));
    CHECK(mean({1.0, 2.0, 3.0}) == 2.0);
    CHECK(variance({1.0, 2.0, 3.0}) == 1.0);
    CHECK(binomial_stderr(0.5, 100) == doctest::Approx(0.05));
    const double se = bootstrap_stderr({1.0, 2.0, 3.0, 4.0, 5.0, 6.0}, [](const std::vector<double>& v) { return mean(v); }, 2000, 3);
    // sd / sqrt(n) with the plug-in sd: sqrt(35/12 / 6)
    CHECK(se == doctest::Approx(std::sqrt(35.0 / 12.0 / 6.0)).epsilon(0.1));
}
