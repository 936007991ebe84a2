#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "recur2d/error.hpp"
#include "recur2d/llt.hpp"
#include "recur2d/systems.hpp"

using namespace recur2d;

namespace {

// P(S_n = 0) by enumerating every path x_0..x_n.
double brute_force_zero(const System& s, int n) {
    const auto& m = s.measure;
    const auto& phi = *s.observable;
    const std::size_t q = m.size();
    double total = 0.0;
    std::vector<Symbol> x(static_cast<std::size_t>(n) + 1, 0);
    std::size_t count = 1;
    for (int i = 0; i <= n; ++i) count *= q;
    for (std::size_t code = 0; code < count; ++code) {
        std::size_t c = code;
        for (auto& v : x) {
            v = static_cast<Symbol>(c % q);
            c /= q;
        }
        double p = m.stationary()(x[0]);
        int sx = 0, sy = 0;
        for (int t = 0; t < n && p > 0.0; ++t) {
            p *= m.transition(x[t], x[t + 1]);
            sx += phi(x[t], x[t + 1]).x;
            sy += phi(x[t], x[t + 1]).y;
        }
        if (sx == 0 && sy == 0) total += p;
    }
    return total;
}

}  // namespace

TEST_CASE("lazy walk eigenvalue closed form") {
    const System s = systems::lazy5();
    for (double u1 : {-3.0, -1.2, 0.0, 0.4, 2.9})
        for (double u2 : {-2.5, 0.0, 0.7, std::numbers::pi}) {
            const auto lam = twisted_eigenvalue(s.measure, *s.observable, {u1, u2});
            CHECK(std::abs(lam - (1.0 + 2.0 * std::cos(u1) + 2.0 * std::cos(u2)) / 5.0) < 1e-12);
        }
    CHECK(std::abs(twisted_eigenvalue(s.measure, *s.observable, {0.0, 0.0}) - 1.0) < 1e-14);
}

TEST_CASE("covariances of the reference walks") {
    const auto lazy = covariance_matrix(systems::lazy5().measure, *systems::lazy5().observable);
    CHECK(lazy.sigma[0][0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(lazy.sigma[1][1] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(std::abs(lazy.sigma[0][1]) < 1e-14);
    CHECK(recurrence_beta(lazy) == doctest::Approx(5.0 / (4.0 * std::numbers::pi)).epsilon(1e-13));

    const auto srw = covariance_matrix(systems::srw4().measure, *systems::srw4().observable);
    CHECK(srw.sigma[0][0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(recurrence_beta(srw) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-13));
}

TEST_CASE("drift is refused") {
    const System b = systems::lazy5_biased();
    CHECK(mean_drift(b.measure, *b.observable)[0] == doctest::Approx(0.2));
    CHECK_THROWS_AS(covariance_matrix(b.measure, *b.observable), Error);
}

TEST_CASE("hessian matches green kubo on the correlated walk") {
    const System s = systems::markov5();
    const auto cov = covariance_matrix(s.measure, *s.observable);
    CHECK(cov.sigma[0][0] > 0.0);
    const auto h = hessian_check(s.measure, *s.observable, cov, 1e-3);
    CHECK(h.deviation < 1e-7);
    CHECK(std::abs(h.grad[0]) < 1e-10);
    CHECK(std::abs(h.grad[1]) < 1e-10);
}

TEST_CASE("nonarithmeticity scan") {
    const System srw = systems::srw4();
    const ScanResult a = nonarithmeticity_scan(srw.measure, *srw.observable, 8);
    CHECK(a.margin < 1e-12);
    const System lazy = systems::lazy5();
    const ScanResult b = nonarithmeticity_scan(lazy.measure, *lazy.observable, 8);
    CHECK(b.margin > 0.0);
    // dominated by the grid points next to 0, not by (pi, pi)
    CHECK(b.margin < 0.4);
    CHECK(subleading_radius(lazy.measure) < 1e-12);
}

TEST_CASE("dp against path enumeration") {
    for (const char* name : {"lazy5", "markov5"}) {
        const System s = systems::by_name(name);
        const auto table = displacement_distribution(s.measure, *s.observable, 6);
        CHECK(table.mass() == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(table.zero_series()[0] == 1.0);
        for (int n = 1; n <= 6; ++n) CHECK(table.zero_series()[n] == doctest::Approx(brute_force_zero(s, n)).epsilon(1e-12));
    }
}

TEST_CASE("dp exact small values for the simple walk") {
    const System s = systems::srw4();
    const auto t = displacement_distribution(s.measure, *s.observable, 5);
    CHECK(t.zero_series()[1] == 0.0);
    CHECK(t.zero_series()[2] == doctest::Approx(0.25));
    CHECK(t.zero_series()[4] == doctest::Approx(36.0 / 256.0));
    CHECK(t.zero_series()[5] == 0.0);
    CHECK(t.prob({2, 0}) == 0.0);
    CHECK(t.prob({1, 0}) > 0.0);
    CHECK(t.prob({2, 1}, 0) + t.prob({2, 1}, 1) + t.prob({2, 1}, 2) + t.prob({2, 1}, 3) == doctest::Approx(t.prob({2, 1})));
}

TEST_CASE("dp chapman kolmogorov") {
    // P(S_6 = 0) = sum_v P(S_3 = v, x_3 = b) P(S_3 = -v | x_0 = b)
    const System s = systems::markov5();
    const auto half = displacement_distribution(s.measure, *s.observable, 3);
    double total = 0.0;
    for (Symbol b = 0; b < 5; ++b) {
        const auto cond = displacement_distribution(s.measure, *s.observable, 3, Window::one_sided({b}));
        for (int x = -3; x <= 3; ++x)
            for (int y = -3; y <= 3; ++y) total += half.prob({x, y}, b) * cond.prob({-x, -y});
    }
    const auto full = displacement_distribution(s.measure, *s.observable, 6);
    CHECK(total == doctest::Approx(full.zero_series()[6]).epsilon(1e-12));
}

TEST_CASE("dp budget") {
    const System s = systems::lazy5();
    const auto need = dp_bytes_required(s.measure, *s.observable, 100);
    try {
        displacement_distribution(s.measure, *s.observable, 100, std::nullopt, need - 1);
        FAIL("expected a budget error");
    } catch (const BudgetError& e) {
        CHECK(e.required() == need);
    }
}

TEST_CASE("conditioned llt bookkeeping") {
    const System s = systems::lazy5();
    const auto a = Window::two_sided({0, 1, 2});
    const auto b = Window::one_sided({1});
    const LltCheck c = llt_conditional_check(s.measure, *s.observable, a, b, 60, 5);
    CHECK(c.nu_a == doctest::Approx(1.0 / 125.0));
    CHECK(c.nu_b == doctest::Approx(0.2));
    const double main = c.nu_a * c.nu_b * 5.0 / (4.0 * std::numbers::pi) / 55.0;
    CHECK(c.main_term == doctest::Approx(main).epsilon(1e-12));
    CHECK(c.ratio == doctest::Approx(c.exact / main).epsilon(1e-12));
    CHECK(c.ratio > 0.8);
    CHECK(c.ratio < 1.2);
    // B is fixed at time n - k, so without conditioning on A the exact value
    // is P(S_n = 0, x_{n-k} = N) and sums to P(S_n = 0) over B
    double sum = 0.0;
    for (Symbol x = 0; x < 5; ++x) sum += llt_conditional_check(s.measure, *s.observable, std::nullopt, Window::one_sided({x}), 30, 4).exact;
    CHECK(sum == doctest::Approx(displacement_distribution(s.measure, *s.observable, 30).zero_series()[30]).epsilon(1e-12));
}
