#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "recur2d/error.hpp"
#include "recur2d/recurrence.hpp"
#include "recur2d/systems.hpp"

using namespace recur2d;

TEST_CASE("non-overlapping windows") {
    const System s = systems::lazy5();
    for (int k = 0; k <= 3; ++k) {
        const Window w = non_overlapping_window(s.measure.sft(), k);
        CHECK(w.radius() == k);
        const Symbol first = w.letters().front();
        for (std::size_t i = 1; i < w.length(); ++i) CHECK(w.letters()[i] != first);
    }
    CHECK(non_overlapping_window(s.measure.sft(), 1).to_string(s.measure.sft()) == "[E N W]");
}

TEST_CASE("cylinder return time of a fixed window") {
    const System s = systems::lazy5();
    const Window w = non_overlapping_window(s.measure.sft(), 0);
    // radius 0: R is geometric with mean 5 (Kac)
    double total = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const auto r = cylinder_return_time(s.measure, w, derive_seed(1, 2, static_cast<std::uint64_t>(i)), 100000);
        CHECK_FALSE(r.censored);
        total += static_cast<double>(r.value);
    }
    CHECK(total / n == doctest::Approx(5.0).epsilon(0.03));
}

TEST_CASE("unconditional returns obey kac") {
    // E[R_k] = number of cylinders with positive measure, for x ~ nu
    const System s = systems::golden_mean();
    double total = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) total += static_cast<double>(cylinder_return_time(s.measure, 1, static_cast<std::uint64_t>(i), 1 << 20).value);
    CHECK(total / n == doctest::Approx(5.0).epsilon(0.04));
}

TEST_CASE("records csv") {
    std::ostringstream os;
    write_records_csv(os, {ReturnRecord{ReturnKind::Cylinder, 7, false, 2, -3.5, 11}, ReturnRecord{ReturnKind::Extension, 100, true, 1, -1.0, 12}});
    const std::string s = os.str();
    CHECK(s.rfind("kind,k,value,censored,log_start_measure,seed\n", 0) == 0);
    CHECK(s.find("cylinder,2,7,0,") != std::string::npos);
    CHECK(s.find("extension,1,100,1,") != std::string::npos);
}

TEST_CASE("extension returns are monotone in k") {
    const System s = systems::lazy5();
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        std::uint64_t prev = 0;
        bool prev_censored = false;
        for (int k = 0; k <= 2; ++k) {
            const auto r = extension_return_time(s.measure, *s.observable, k, seed, 20000);
            if (k > 0) CHECK((r.censored || (!prev_censored && r.value >= prev)));
            prev = r.value;
            prev_censored = r.censored;
        }
    }
}

TEST_CASE("extension return at k = 0 starts after the first zero") {
    const System s = systems::lazy5();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto t = extension_return_trace(s.measure, *s.observable, 0, seed, 100000);
        if (!t.record.censored) CHECK(t.record.value >= t.first_zero);
    }
    CHECK_THROWS_AS(extension_return_time(systems::lazy5_biased().measure, *systems::lazy5_biased().observable, 0, 1, 10), Error);
}

TEST_CASE("hirata at small k") {
    const System s = systems::lazy5();
    const auto h = hirata_experiment(s.measure, 1, non_overlapping_window(s.measure.sft(), 1), 3000, 17, 50.0, 2);
    CHECK(h.records.size() == 3000);
    CHECK(h.ks.distance < 0.06);
}

TEST_CASE("lower tail budget ceiling") {
    const System s = systems::lazy5();
    CHECK_THROWS_AS(theorem8_lower_tail(s.measure, *s.observable, 3, {0.1}, 10, 1, 1e6), BudgetError);
}

TEST_CASE("q matrix structure") {
    const System g = systems::golden_mean();
    const auto q = q_matrix(g.measure, {2, 3, 4});
    CHECK(q.constancy_deviation < 1e-10);
    CHECK(q.q(1, 1) == doctest::Approx(q.closed_form(1, 1)).epsilon(1e-10));
    CHECK(q.weights.sum() == doctest::Approx(1.0));
    const auto mix = q.mixture(1.0);
    CHECK(mix(1e9) == doctest::Approx(1.0).epsilon(1e-6));

    const System f = systems::full_shift(3);
    CHECK((q_matrix(f.measure, {1, 2}).q.array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(q_matrix(systems::markov5().measure, {1}), Error);
}

TEST_CASE("min cylinder measure") {
    const System s = systems::lazy5();
    CHECK(min_log_cylinder_measure(s.measure, 2) == doctest::Approx(-5.0 * std::log(5.0)));
}
