#include <doctest.h>

#include <cmath>

#include "recur2d/error.hpp"
#include "recur2d/markov.hpp"
#include "recur2d/systems.hpp"

using namespace recur2d;

namespace {

const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

SftSpec golden_sft() { return SftSpec({"0", "1"}, BoolMatrix::from_rows({{1, 1}, {1, 0}})); }

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no exception");
    return ErrorCode::Io;
}

}  // namespace

TEST_CASE("primitivity exponent") {
    CHECK(check_primitive(BoolMatrix::from_rows({{1, 1}, {1, 0}})) == 2);
    CHECK(check_primitive(BoolMatrix::from_rows({{1, 1}, {1, 1}})) == 1);
    // period 2
    CHECK(code_of([] { check_primitive(BoolMatrix::from_rows({{0, 1}, {1, 0}})); }) == ErrorCode::NotPrimitive);
    // Wielandt bound is attained by this 3x3 example: (3-1)^2 + 1 = 5
    CHECK(check_primitive(BoolMatrix::from_rows({{0, 1, 0}, {0, 0, 1}, {1, 1, 0}})) == 5);
}

TEST_CASE("windows and metric") {
    const SftSpec g = golden_sft();
    CHECK(Window::two_sided({0, 1, 0}).admissible_in(g));
    CHECK_FALSE(Window::two_sided({1, 1, 0}).admissible_in(g));
    CHECK(code_of([&] { Window::two_sided({0, 1, 1}).require_admissible(g); }) == ErrorCode::InadmissibleWindow);
    CHECK(code_of([] { Window::two_sided({0, 1}); }) != ErrorCode::Io);

    // radius-2 windows of the golden mean shift: Fibonacci count
    CHECK(enumerate_windows(g, 2).size() == 13);
    CHECK(enumerate_windows(g, 0).size() == 2);

    const auto x = Window::two_sided({0, 0, 1, 0, 0});
    const auto y = Window::two_sided({1, 0, 1, 0, 0});
    CHECK(metric_distance(x, y).value == doctest::Approx(std::exp(-2.0)));
    CHECK(metric_distance(x, x).radius_limited);
    CHECK(cylinder_of(x, 1) == Window::two_sided({0, 1, 0}));
}

TEST_CASE("golden mean maximal measure") {
    const MarkovMeasure m = max_entropy_measure(golden_sft());
    CHECK(m.perron_value() == doctest::Approx(kGolden).epsilon(1e-13));
    CHECK(m.entropy() == doctest::Approx(std::log(kGolden)).epsilon(1e-12));
    CHECK(m.stationary()(0) == doctest::Approx(kGolden * kGolden / (1.0 + kGolden * kGolden)).epsilon(1e-12));
    CHECK(m.stochastic()(0, 1) == doctest::Approx(1.0 / (kGolden * kGolden)).epsilon(1e-12));
    CHECK(m.stochastic()(1, 0) == doctest::Approx(1.0));
    CHECK(m.dimension() == doctest::Approx(2.0 * std::log(kGolden)));
}

TEST_CASE("gibbs measure is invariant under coboundaries") {
    const SftSpec g = golden_sft();
    const auto h = PairPotential::from_function(g, [](Symbol a, Symbol b) { return 0.3 * a - 0.7 * b + (a == b ? 0.2 : 0.0); });
    // h + u(a) - u(b) + c gives the same chain
    const auto h2 = PairPotential::from_function(g, [&](Symbol a, Symbol b) {
        return h.values(a, b) + (a == 0 ? 1.1 : -0.4) - (b == 0 ? 1.1 : -0.4) + 0.9;
    });
    const MarkovMeasure m1 = gibbs_from_potential(g, h);
    const MarkovMeasure m2 = gibbs_from_potential(g, h2);
    CHECK((m1.stochastic() - m2.stochastic()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(m2.perron_value() == doctest::Approx(m1.perron_value() * std::exp(0.9)).epsilon(1e-12));
}

TEST_CASE("cylinder measures") {
    const System s = systems::lazy5();
    const auto w = Window::two_sided({0, 1, 4});
    CHECK(cylinder_measure(s.measure, w).value == doctest::Approx(1.0 / 125.0).epsilon(1e-14));
    CHECK(cylinder_measure(s.measure, w).log_value == doctest::Approx(-3.0 * std::log(5.0)));

    const MarkovMeasure g = max_entropy_measure(golden_sft());
    double total = 0.0;
    for (const auto& win : enumerate_windows(g.sft(), 3)) total += cylinder_measure(g, win).value;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("lazy point is a function of the seed") {
    const System s = systems::markov5();
    LazyPoint a(s.measure, 99), b(s.measure, 99);
    const Window wa = a.window(6);
    b.at(40);
    b.at(-30);
    CHECK(b.window(6) == wa);
    auto cur = a.cursor();
    LazyPoint c(s.measure, 99);
    c.window(6);
    for (int i = 0; i < 50; ++i) {
        const Symbol next = cur.next();
        CHECK(next == c.at(cur.index()));
    }
}

TEST_CASE("stationary path frequencies") {
    const System s = systems::markov5();
    Rng rng(5);
    const auto path = sample_path(s.measure, 200000, rng);
    std::vector<double> freq(5, 0.0);
    for (Symbol x : path) freq[x] += 1.0 / static_cast<double>(path.size());
    for (int a = 0; a < 5; ++a) CHECK(std::abs(freq[a] - s.measure.stationary()(a)) < 0.01);
}

TEST_CASE("green kubo scalar variance of an iid coordinate") {
    // full shift on 2 symbols, uniform: f(a) = a has variance 1/4 and no correlations
    const System s = systems::full_shift(2);
    const auto f = PairPotential::from_symbol_values(s.measure.sft(), {0.0, 1.0});
    CHECK(asymptotic_variance_scalar(s.measure, f) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("two-state chain variance") {
    // pi = [[1-a, a], [b, 1-b]], f = indicator of state 1:
    // sigma^2 = p0 p1 (2 - a - b) / (a + b)
    const double a = 0.2, b = 0.5;
    const SftSpec sft = SftSpec::full_shift({"x", "y"});
    Eigen::MatrixXd pi(2, 2);
    pi << 1 - a, a, b, 1 - b;
    Eigen::VectorXd p(2);
    p << b / (a + b), a / (a + b);
    const MarkovMeasure m(sft, pi, p, 1.0);
    const auto f = PairPotential::from_symbol_values(sft, {0.0, 1.0});
    CHECK(asymptotic_variance_scalar(m, f) == doctest::Approx(p(0) * p(1) * (2 - a - b) / (a + b)).epsilon(1e-12));
}
