#include "recur2d/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "recur2d/llt.hpp"
#include "recur2d/planar.hpp"
#include "recur2d/recurrence.hpp"
#include "recur2d/toy.hpp"

namespace recur2d {

namespace {

// Shipped suite. config/accept.json is a copy; a unit test keeps them equal.
constexpr const char* kDefaultSuite = R"json({
  "schema_version": 1,
  "kind": "accept",
  "seed": 20240601,
  "workers": 1,
  "params": {
    "sampler": {"cap": 1000000, "samples": 100000, "tail": "shifted"},
    "c1": {"system": "lazy5", "grid_n": 64, "step": 0.001},
    "c2": {"system": "markov5", "step": 0.001},
    "c3": {"system": "lazy5", "n": 1000, "check_n": 500, "early_n": 250},
    "c4": {"system": "lazy5", "A": ["E", "N", "W"], "B": ["N"], "n": 400, "k": 10},
    "c5": {"system": "srw4", "grid_n": 64, "n_even": 200, "n_odd": 201},
    "c6": {"system": "lazy5", "k": 2, "k_low": 1, "k_high": 3, "samples": 10000, "budget_factor": 50},
    "c7": {"system": "lazy5", "k": 1, "t_list": [0.02, 0.05, 0.1], "trajectories": 100000, "step_ceiling": 1e7},
    "c8": {"delta": 0.001, "t_list": [1, 3.141592653589793, 10], "trials": 100000},
    "c9": {"threshold": 10000, "reference": 0.341},
    "c10": {"epsilon": 0.2, "trials": 10000, "budget": 100000},
    "c11": {"law": "gaussian", "scale": 1, "n_list": [100, 1000, 10000], "eps_list": [0.05, 0.1, 0.2, 0.4],
            "trials": 1000000, "slope_n": -1, "slope_eps": 2},
    "c12": {"system": "markov5", "k": 200, "samples": 10000},
    "c13": {"system": "golden_mean", "k_list": [2, 3, 4, 5, 6], "full_shifts": [2, 3, 5], "full_k_list": [1, 2, 3]},
    "c14": {"workers": [1, 8]},
    "c15": {
      "toy": {"eps_list": [0.36787944117144233, 0.1353352832366127, 0.049787068367863944], "trials": 10000, "target": 2},
      "planar": {"law": "gaussian", "scale": 1, "eps_list": [1, 0.8, 0.6, 0.5, 0.4], "trials": 400, "budget": 2000000},
      "pathwise": {"system": "lazy5", "k_list": [0, 1, 2], "seeds": 1000, "budget": 100000}
    }
  },
  "tolerances": {
    "c1": {"eigenvalue": 1e-10, "hessian": 1e-5, "beta": 1e-10},
    "c2": {"entry": 1e-5},
    "c3": {"relative": 0.02},
    "c4": {"ratio_low": 0.95, "ratio_high": 1.05},
    "c5": {"margin": 1e-12, "relative": 0.02},
    "c6": {"ks": 0.05},
    "c7": {"absolute": 0.02},
    "c8": {"absolute": 0.03},
    "c9": {"absolute": 0.05},
    "c10": {"ks": 0.03},
    "c11": {"slope": 0.1},
    "c12": {"ks": 0.03},
    "c13": {"deviation": 1e-10, "full_shift": 1e-12},
    "c14": {},
    "c15": {"toy_final": 0.05}
  }
})json";

constexpr const char* kSmokeSuite = R"json({
  "schema_version": 1,
  "kind": "accept",
  "seed": 7,
  "workers": 1,
  "params": {
    "criteria": [1, 3, 5, 6, 7, 8, 10, 11, 12, 13, 15],
    "sampler": {"cap": 1000, "samples": 2000, "tail": "shifted"},
    "c1": {"system": "lazy5", "grid_n": 16, "step": 0.001},
    "c3": {"system": "lazy5", "n": 60, "check_n": 40, "early_n": 20},
    "c5": {"system": "srw4", "grid_n": 8, "n_even": 40, "n_odd": 41},
    "c6": {"system": "lazy5", "k": 1, "k_low": 1, "k_high": 2, "samples": 400, "budget_factor": 20},
    "c7": {"system": "lazy5", "k": 1, "t_list": [0.02, 0.05], "trajectories": 300, "step_ceiling": 1e7},
    "c8": {"delta": 0.01, "t_list": [1, 10], "trials": 2000},
    "c10": {"epsilon": 0.3, "trials": 300, "budget": 2000},
    "c11": {"law": "gaussian", "scale": 1, "n_list": [10, 20, 40], "eps_list": [0.1, 0.2, 0.4],
            "trials": 3000, "slope_n": -1, "slope_eps": 2},
    "c12": {"system": "markov5", "k": 20, "samples": 500},
    "c13": {"system": "golden_mean", "k_list": [2, 3], "full_shifts": [2], "full_k_list": [1]},
    "c15": {
      "toy": {"eps_list": [0.36787944117144233, 0.1353352832366127], "trials": 300, "target": 2},
      "planar": {"law": "gaussian", "scale": 1, "eps_list": [1, 0.8], "trials": 50, "budget": 20000},
      "pathwise": {"system": "lazy5", "k_list": [0, 1], "seeds": 40, "budget": 2000}
    }
  },
  "tolerances": {
    "c1": {"eigenvalue": 1e-10, "hessian": 1e-5, "beta": 1e-10},
    "c3": {"relative": 0.5},
    "c5": {"margin": 1e-12, "relative": 0.1},
    "c6": {"ks": 1},
    "c7": {"absolute": 1},
    "c8": {"absolute": 1},
    "c10": {"ks": 1},
    "c11": {"slope": 10},
    "c12": {"ks": 1},
    "c13": {"deviation": 1e-10, "full_shift": 1e-12},
    "c15": {"toy_final": 10}
  }
})json";

const std::vector<std::string> kTitles = {
    "spectral exactness",
    "Green-Kubo vs Hessian",
    "LLT constant",
    "LLT conditioned",
    "arithmetic obstruction",
    "Hirata law",
    "lower tail of the extension return time",
    "toy model end to end",
    "first-return tail at 1e4",
    "toy decomposition identity",
    "planar return probability shape",
    "CLT for cylinder measures",
    "max-entropy Q matrix",
    "reproducibility across worker counts",
    "trend checks",
};

struct Context {
    const ExperimentConfig& config;
    const RunOptions& options;
    RunResult& out;
    std::optional<HeavyTailReturnSampler> sampler;

    std::uint64_t seed(int id) const { return derive_seed(config.seed, 0xacce, static_cast<std::uint64_t>(id)); }

    const HeavyTailReturnSampler& shared_sampler() {
        if (!sampler) {
            if (!config.params.contains("sampler")) throw Error(ErrorCode::ConfigInvalid, "$.params.sampler: required");
            ParamReader r(config.params.at("sampler"), "$.params.sampler");
            const auto cap = static_cast<std::uint64_t>(r.integer("cap"));
            const auto n = static_cast<std::size_t>(r.integer("samples"));
            const std::string tail = r.string("tail", "shifted");
            r.finish();
            if (tail != "shifted" && tail != "literal")
                throw Error(ErrorCode::ConfigInvalid, "$.params.sampler.tail: shifted or literal");
            if (options.log) *options.log << "building sampler: cap " << cap << ", " << n << " returns" << std::endl;
            sampler = HeavyTailReturnSampler::build(
                cap, n, derive_seed(config.seed, 0x5a5a, 0), config.workers,
                tail == "literal" ? HeavyTailReturnSampler::Tail::Literal : HeavyTailReturnSampler::Tail::Shifted);
        }
        return *sampler;
    }

    void artifact(int id, const std::string& name, std::string content) {
        char prefix[8];
        std::snprintf(prefix, sizeof prefix, "c%02d_", id);
        out.artifacts.push_back({prefix + name, std::move(content)});
    }
};

struct Readers {
    ParamReader p;
    ParamReader t;
};

Readers readers(const ExperimentConfig& c, int id) {
    const std::string key = "c" + std::to_string(id);
    static const Json empty = Json::object();
    const Json& p = c.params.contains(key) ? c.params.at(key) : empty;
    const Json& t = c.tolerances.contains(key) ? c.tolerances.at(key) : empty;
    if (!p.is_object()) throw Error(ErrorCode::ConfigInvalid, "$.params." + key + ": expected an object");
    if (!t.is_object()) throw Error(ErrorCode::ConfigInvalid, "$.tolerances." + key + ": expected an object");
    return {ParamReader(p, "$.params." + key), ParamReader(t, "$.tolerances." + key)};
}

System system_of(ParamReader& p) { return resolve_system(p.raw("system"), p.child_path("system")); }

std::string fmt(double v) { return format_number(v); }

CriterionResult c1(Context& ctx, Readers& r) {
    const System sys = system_of(r.p);
    const int grid_n = static_cast<int>(r.p.integer("grid_n"));
    const double step = r.p.number("step");
    const double tol_eig = r.t.number("eigenvalue"), tol_h = r.t.number("hessian"), tol_b = r.t.number("beta");
    const auto& phi = sys.observable.value();
    double eig_dev = 0.0;
    for (int i = 0; i < grid_n; ++i)
        for (int j = 0; j < grid_n; ++j) {
            const Vec2 u{-std::numbers::pi + 2.0 * std::numbers::pi * i / grid_n,
                         -std::numbers::pi + 2.0 * std::numbers::pi * j / grid_n};
            const std::complex<double> lam = twisted_eigenvalue(sys.measure, phi, u);
            const double closed = (1.0 + 2.0 * std::cos(u[0]) + 2.0 * std::cos(u[1])) / 5.0;
            eig_dev = std::max(eig_dev, std::abs(lam - closed));
        }
    const auto cov = covariance_matrix(sys.measure, phi);
    const HessianResult h = hessian_check(sys.measure, phi, cov, step);
    const double beta = recurrence_beta(cov);
    const double beta_ref = 5.0 / (4.0 * std::numbers::pi);
    const double beta_dev = std::abs(beta - beta_ref);
    CriterionResult res;
    res.pass = eig_dev <= tol_eig && h.deviation <= tol_h && beta_dev <= tol_b;
    res.detail = "max eigenvalue error " + fmt(eig_dev) + ", hessian deviation " + fmt(h.deviation) + ", beta error " +
                 fmt(beta_dev);
    res.metrics = {{"eigenvalue_error", eig_dev}, {"hessian_deviation", h.deviation}, {"beta", beta}, {"beta_error", beta_dev}};
    (void)ctx;
    return res;
}

CriterionResult c2(Context&, Readers& r) {
    const System sys = system_of(r.p);
    const double step = r.p.number("step");
    const double tol = r.t.number("entry");
    const auto& phi = sys.observable.value();
    const auto cov = covariance_matrix(sys.measure, phi);
    const HessianResult h = hessian_check(sys.measure, phi, cov, step);
    CriterionResult res;
    res.pass = h.deviation <= tol;
    res.detail = "max |sigma + D2 lambda| = " + fmt(h.deviation);
    res.metrics = {{"sigma", {{cov.sigma[0][0], cov.sigma[0][1]}, {cov.sigma[1][0], cov.sigma[1][1]}}},
                   {"hessian", {{h.hessian[0][0], h.hessian[0][1]}, {h.hessian[1][0], h.hessian[1][1]}}},
                   {"deviation", h.deviation}};
    return res;
}

CriterionResult c3(Context& ctx, Readers& r) {
    const System sys = system_of(r.p);
    const int n = static_cast<int>(r.p.integer("n"));
    const int check_n = static_cast<int>(r.p.integer("check_n"));
    const int early_n = static_cast<int>(r.p.integer("early_n"));
    const double tol = r.t.number("relative");
    if (check_n > n || early_n > n || check_n < 1 || early_n < 1)
        throw Error(ErrorCode::ConfigInvalid, r.p.path() + ": check_n and early_n must lie in 1..n");
    const auto& phi = sys.observable.value();
    const double beta = recurrence_beta(covariance_matrix(sys.measure, phi));
    const DisplacementTable table = displacement_distribution(sys.measure, phi, n);
    const auto& z = table.zero_series();
    auto dev = [&](int t) { return std::abs(t * z[static_cast<std::size_t>(t)] - beta) / beta; };
    CsvText csv({"t", "t_p_zero", "relative_deviation"});
    for (int t = 1; t <= n; ++t) {
        csv.cell(static_cast<std::int64_t>(t)).cell(t * z[static_cast<std::size_t>(t)]).cell(dev(t));
        csv.end_row();
    }
    ctx.artifact(3, "zero_series.csv", csv.str());
    CriterionResult res;
    res.pass = dev(check_n) <= tol && dev(n) < dev(early_n);
    res.detail = "relative deviation " + fmt(dev(early_n)) + " / " + fmt(dev(check_n)) + " / " + fmt(dev(n)) + " at n = " +
                 std::to_string(early_n) + " / " + std::to_string(check_n) + " / " + std::to_string(n);
    res.metrics = {{"beta", beta}, {"deviation_early", dev(early_n)}, {"deviation_check", dev(check_n)},
                   {"deviation_final", dev(n)}, {"mass", table.mass()}};
    return res;
}

CriterionResult c4(Context&, Readers& r) {
    const System sys = system_of(r.p);
    const Window a = parse_window(sys.measure.sft(), r.p.raw("A"), true, r.p.child_path("A"));
    const Window b = parse_window(sys.measure.sft(), r.p.raw("B"), false, r.p.child_path("B"));
    const int n = static_cast<int>(r.p.integer("n"));
    const int k = static_cast<int>(r.p.integer("k"));
    const double lo = r.t.number("ratio_low"), hi = r.t.number("ratio_high");
    const LltCheck chk = llt_conditional_check(sys.measure, sys.observable.value(), a, b, n, k);
    CriterionResult res;
    res.pass = chk.ratio >= lo && chk.ratio <= hi;
    res.detail = "A = " + a.to_string(sys.measure.sft()) + ", B = " + b.to_string(sys.measure.sft()) + ": ratio " +
                 fmt(chk.ratio) + " (scaled error " + fmt(chk.scaled_error) + ")";
    res.metrics = {{"exact", chk.exact}, {"main_term", chk.main_term}, {"ratio", chk.ratio},
                   {"relative_deviation", chk.relative_deviation}, {"scaled_error", chk.scaled_error}};
    return res;
}

CriterionResult c5(Context& ctx, Readers& r) {
    const System sys = system_of(r.p);
    const int grid_n = static_cast<int>(r.p.integer("grid_n"));
    const int n_even = static_cast<int>(r.p.integer("n_even"));
    const int n_odd = static_cast<int>(r.p.integer("n_odd"));
    const double tol_margin = r.t.number("margin"), tol_rel = r.t.number("relative");
    if (n_even % 2 != 0 || n_odd % 2 != 1) throw Error(ErrorCode::ConfigInvalid, r.p.path() + ": n_even / n_odd parity");
    const auto& phi = sys.observable.value();
    const ScanResult scan = nonarithmeticity_scan(sys.measure, phi, grid_n, ctx.config.workers);
    const bool at_pi = std::any_of(scan.argmax_set.begin(), scan.argmax_set.end(), [](const Vec2& u) {
        return std::abs(u[0] - std::numbers::pi) < 1e-12 && std::abs(u[1] - std::numbers::pi) < 1e-12;
    });
    const DisplacementTable table = displacement_distribution(sys.measure, phi, std::max(n_even, n_odd));
    const double even = n_even * table.zero_series()[static_cast<std::size_t>(n_even)];
    const double odd = table.zero_series()[static_cast<std::size_t>(n_odd)];
    const double target = 2.0 / std::numbers::pi;
    const double rel = std::abs(even - target) / target;
    CriterionResult res;
    res.pass = scan.margin <= tol_margin && at_pi && rel <= tol_rel && odd == 0.0;
    res.detail = "margin " + fmt(scan.margin) + (at_pi ? " attained at (pi,pi)" : " not attained at (pi,pi)") +
                 "; n P = " + fmt(even) + " at n = " + std::to_string(n_even) + ", P = " + fmt(odd) + " at n = " +
                 std::to_string(n_odd);
    res.metrics = {{"margin", scan.margin}, {"attained_at_pi_pi", at_pi}, {"n_p_even", even},
                   {"relative_deviation", rel}, {"p_odd", odd}};
    return res;
}

CriterionResult c6(Context& ctx, Readers& r) {
    const System sys = system_of(r.p);
    const int k = static_cast<int>(r.p.integer("k"));
    const int k_low = static_cast<int>(r.p.integer("k_low"));
    const int k_high = static_cast<int>(r.p.integer("k_high"));
    const auto n = static_cast<std::size_t>(r.p.integer("samples"));
    const double factor = r.p.number("budget_factor");
    const double tol = r.t.number("ks");
    std::vector<int> ks{k_low, k, k_high};
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    Json per_k = Json::object();
    std::vector<ReturnRecord> all;
    std::map<int, double> dist;
    for (int kk : ks) {
        if (ctx.options.log) *ctx.options.log << "  hirata k = " << kk << std::endl;
        const Window w = non_overlapping_window(sys.measure.sft(), kk);
        const HirataResult h = hirata_experiment(sys.measure, kk, w, n, derive_seed(ctx.seed(6), 0, static_cast<std::uint64_t>(kk)),
                                                 factor, ctx.config.workers);
        dist[kk] = h.ks.distance;
        per_k[std::to_string(kk)] = {{"window", w.to_string(sys.measure.sft())}, {"ks", h.ks.distance}, {"coverage", h.ks.coverage}};
        all.insert(all.end(), h.records.begin(), h.records.end());
    }
    std::ostringstream os;
    write_records_csv(os, all);
    ctx.artifact(6, "records.csv", os.str());
    CriterionResult res;
    res.pass = dist[k] <= tol && dist[k_high] <= dist[k_low];
    res.detail = "KS " + fmt(dist[k]) + " at k = " + std::to_string(k) + "; " + fmt(dist[k_high]) + " at k = " +
                 std::to_string(k_high) + " vs " + fmt(dist[k_low]) + " at k = " + std::to_string(k_low);
    res.metrics = per_k;
    return res;
}

CriterionResult c7(Context& ctx, Readers& r) {
    const System sys = system_of(r.p);
    const int k = static_cast<int>(r.p.integer("k"));
    const auto t_list = r.p.numbers("t_list");
    const auto n = static_cast<std::size_t>(r.p.integer("trajectories"));
    const double ceiling = r.p.number("step_ceiling");
    const double tol = r.t.number("absolute");
    const LowerTailResult lt = theorem8_lower_tail(sys.measure, sys.observable.value(), k, t_list, n, ctx.seed(7), ceiling,
                                                   ctx.config.workers);
    bool within = true, monotone = true;
    double worst = 0.0;
    CsvText csv({"t", "empirical", "stderr", "limit"});
    for (std::size_t i = 0; i < lt.rows.size(); ++i) {
        const auto& row = lt.rows[i];
        worst = std::max(worst, std::abs(row.empirical - row.limit));
        within = within && std::abs(row.empirical - row.limit) <= tol;
        if (i > 0) monotone = monotone && row.empirical >= lt.rows[i - 1].empirical;
        csv.cell(row.t).cell(row.empirical).cell(row.stderr_).cell(row.limit);
        csv.end_row();
    }
    ctx.artifact(7, "tail.csv", csv.str());
    CriterionResult res;
    res.pass = within && monotone;
    std::string vals;
    for (const auto& row : lt.rows) vals += (vals.empty() ? "" : ", ") + fmt(row.empirical) + " vs " + fmt(row.limit);
    res.detail = vals + (monotone ? "" : "; not monotone");
    res.metrics = {{"max_abs_error", worst}, {"monotone", monotone}, {"censored_fraction", lt.censored_fraction},
                   {"beta", lt.beta}};
    return res;
}

CriterionResult c8(Context& ctx, Readers& r) {
    const double delta = r.p.number("delta");
    const auto t_list = r.p.numbers("t_list");
    const auto n = static_cast<std::size_t>(r.p.integer("trials"));
    const double tol = r.t.number("absolute");
    const auto& s = ctx.shared_sampler();
    const ToyTauResult tr = toy_tau_cdf(delta, t_list, n, s, ctx.seed(8), ctx.config.workers);
    double worst = 0.0;
    CsvText csv({"t", "empirical", "stderr", "limit"});
    std::string vals;
    for (const auto& row : tr.rows) {
        worst = std::max(worst, std::abs(row.empirical - row.limit));
        csv.cell(row.t).cell(row.empirical).cell(row.stderr_).cell(row.limit);
        csv.end_row();
        vals += (vals.empty() ? "" : ", ") + fmt(row.empirical) + " vs " + fmt(row.limit);
    }
    ctx.artifact(8, "tau.csv", csv.str());
    CriterionResult res;
    res.pass = worst <= tol;
    res.detail = vals;
    res.metrics = {{"max_abs_error", worst}, {"sampler_censored_fraction", s.censored_fraction()}};
    return res;
}

CriterionResult c9(Context& ctx, Readers& r) {
    const double threshold = r.p.number("threshold");
    const double reference = r.p.number("reference");
    const double tol = r.t.number("absolute");
    const auto& s = ctx.shared_sampler();
    if (threshold >= static_cast<double>(s.cap()))
        throw Error(ErrorCode::ConfigInvalid, r.p.child_path("threshold") + ": must be below the sampler cap");
    const double p = s.empirical_survival(threshold);
    const double se = binomial_stderr(p, s.total());
    CriterionResult res;
    res.pass = std::abs(p - reference) <= tol;
    res.detail = "P(R1 > " + fmt(threshold) + ") = " + fmt(p) + " +- " + fmt(se) + " vs " + fmt(reference) +
                 "; pi / log s gives " + fmt(std::numbers::pi / std::log(threshold));
    res.metrics = {{"empirical", p}, {"stderr", se}, {"reference", reference},
                   {"pi_over_log", std::numbers::pi / std::log(threshold)}, {"samples", s.total()}};
    return res;
}

CriterionResult c10(Context& ctx, Readers& r) {
    const double eps = r.p.number("epsilon");
    const auto n = static_cast<std::size_t>(r.p.integer("trials"));
    const auto budget = static_cast<std::uint64_t>(r.p.integer("budget"));
    const double tol = r.t.number("ks");
    const ToyVerifyResult v = toy_direct_vs_decomposed(eps, n, ctx.seed(10), budget, ctx.config.workers);
    CriterionResult res;
    res.pass = v.ks <= tol;
    res.detail = "two-sample KS " + fmt(v.ks) + " (censored " + fmt(v.direct_censored) + " / " + fmt(v.decomposed_censored) + ")";
    res.metrics = {{"ks", v.ks}, {"direct_censored", v.direct_censored}, {"decomposed_censored", v.decomposed_censored},
                   {"direct_flagged", v.direct_flagged}, {"decomposed_flagged", v.decomposed_flagged}};
    return res;
}

CriterionResult c11(Context& ctx, Readers& r) {
    const PlanarWalkLaw law = PlanarWalkLaw::by_name(r.p.string("law"), r.p.number("scale"));
    const auto n_list = r.p.integers("n_list");
    const auto eps_list = r.p.numbers("eps_list");
    const auto n = static_cast<std::size_t>(r.p.integer("trials"));
    const double target_n = r.p.number("slope_n"), target_eps = r.p.number("slope_eps");
    const double tol = r.t.number("slope");
    const PlanarProbResult pr = planar_return_prob(law, n_list, eps_list, n, ctx.seed(11), ctx.config.workers);
    double worst_n = 0.0, worst_eps = 0.0;
    for (double s : pr.slope_n) worst_n = std::max(worst_n, std::abs(s - target_n));
    for (double s : pr.slope_eps) worst_eps = std::max(worst_eps, std::abs(s - target_eps));
    CsvText csv({"n", "eps", "p", "stderr"});
    for (const auto& c : pr.cells) {
        csv.cell(static_cast<std::int64_t>(c.n)).cell(c.eps).cell(c.p).cell(c.stderr_);
        csv.end_row();
    }
    ctx.artifact(11, "prob.csv", csv.str());
    CriterionResult res;
    res.pass = pr.certified && worst_n <= tol && worst_eps <= tol;
    res.detail = "slopes in log n " + fmt(*std::min_element(pr.slope_n.begin(), pr.slope_n.end())) + ".." +
                 fmt(*std::max_element(pr.slope_n.begin(), pr.slope_n.end())) + ", in log eps " +
                 fmt(*std::min_element(pr.slope_eps.begin(), pr.slope_eps.end())) + ".." +
                 fmt(*std::max_element(pr.slope_eps.begin(), pr.slope_eps.end()));
    res.metrics = {{"slope_n", pr.slope_n}, {"slope_eps", pr.slope_eps}, {"certified", pr.certified}};
    return res;
}

CriterionResult c12(Context& ctx, Readers& r) {
    const System sys = system_of(r.p);
    const int k = static_cast<int>(r.p.integer("k"));
    const auto n = static_cast<std::size_t>(r.p.integer("samples"));
    const double tol = r.t.number("ks");
    const CltSamples cs = clt_fluctuation_samples(sys.measure, k, n, ctx.seed(12), ctx.config.workers);
    const double sigma2 = asymptotic_variance_scalar(sys.measure, log_transition_potential(sys.measure));
    const auto ref = ReferenceCdf::normal(2.0 * sigma2);
    const double ks_c = ks_distance(Ecdf(cs.corrected), ref).distance;
    const double ks_r = ks_distance(Ecdf(cs.raw), ref).distance;
    CriterionResult res;
    res.pass = ks_c <= tol;
    res.detail = "KS " + fmt(ks_c) + " with exact centring (" + fmt(ks_r) + " uncentred), sigma_h^2 = " + fmt(sigma2);
    res.metrics = {{"ks_corrected", ks_c}, {"ks_raw", ks_r}, {"sigma_h2", sigma2}};
    return res;
}

CriterionResult c13(Context& ctx, Readers& r) {
    const System sys = system_of(r.p);
    const auto k_list = r.p.integers("k_list");
    const auto full = r.p.integers("full_shifts");
    const auto full_k = r.p.integers("full_k_list");
    const double tol = r.t.number("deviation"), tol_full = r.t.number("full_shift");
    const QMatrixReport q = q_matrix(sys.measure, k_list, 200000, ctx.seed(13));
    double full_dev = 0.0;
    for (int n : full) {
        const System fs = systems::full_shift(n);
        const QMatrixReport qf = q_matrix(fs.measure, full_k, 200000, ctx.seed(13));
        full_dev = std::max(full_dev, (qf.q.array() - 1.0).abs().maxCoeff());
    }
    CriterionResult res;
    res.pass = q.constancy_deviation <= tol && full_dev <= tol_full;
    res.detail = "constancy deviation " + fmt(q.constancy_deviation) + ", full shifts max |Q - 1| = " + fmt(full_dev);
    res.metrics = {{"constancy_deviation", q.constancy_deviation}, {"full_shift_deviation", full_dev},
                   {"windows_checked", q.windows_checked}};
    return res;
}

CriterionResult c14(Context& ctx, Readers& r) {
    const auto workers = r.p.integers("workers");
    if (workers.size() < 2) throw Error(ErrorCode::ConfigInvalid, r.p.child_path("workers") + ": at least two counts");
    ExperimentConfig smoke = parse_config(smoke_acceptance_config());
    smoke.seed = ctx.config.seed;
    std::vector<RunResult> runs;
    for (int w : workers) {
        if (w < 1) throw Error(ErrorCode::ConfigInvalid, r.p.child_path("workers") + ": counts must be positive");
        smoke.workers = static_cast<unsigned>(w);
        if (ctx.options.log) *ctx.options.log << "  smoke suite at " << w << " workers" << std::endl;
        runs.push_back(run_experiment(smoke, RunOptions{}));
    }
    bool same = true;
    std::string first_diff;
    const RunResult& base = runs.front();
    for (std::size_t i = 1; i < runs.size(); ++i) {
        const RunResult& o = runs[i];
        if (o.manifest.at("manifest_digest") != base.manifest.at("manifest_digest")) {
            same = false;
            if (first_diff.empty()) first_diff = "manifest digest";
        }
        if (o.artifacts.size() != base.artifacts.size()) {
            same = false;
            if (first_diff.empty()) first_diff = "artifact count";
            continue;
        }
        for (std::size_t j = 0; j < o.artifacts.size(); ++j)
            if (o.artifacts[j].name != base.artifacts[j].name || o.artifacts[j].content != base.artifacts[j].content) {
                same = false;
                if (first_diff.empty()) first_diff = base.artifacts[j].name;
            }
    }
    CriterionResult res;
    res.pass = same;
    std::string counts;
    for (int w : workers) counts += (counts.empty() ? "" : ", ") + std::to_string(w);
    res.detail = same ? "manifest and " + std::to_string(base.artifacts.size()) + " CSV bodies identical at workers " + counts
                      : "runs differ in " + first_diff;
    res.metrics = {{"manifest_digest", base.manifest.at("manifest_digest")}, {"artifacts", base.artifacts.size()}};
    return res;
}

CriterionResult c15(Context& ctx, Readers& r) {
    ParamReader toy = r.p.child("toy");
    const auto toy_eps = toy.numbers("eps_list");
    const auto toy_n = static_cast<std::size_t>(toy.integer("trials"));
    const double target = toy.number("target");
    toy.finish();
    ParamReader pl = r.p.child("planar");
    const PlanarWalkLaw law = PlanarWalkLaw::by_name(pl.string("law"), pl.number("scale"));
    const auto pl_eps = pl.numbers("eps_list");
    const auto pl_n = static_cast<std::size_t>(pl.integer("trials"));
    const auto pl_budget = static_cast<std::uint64_t>(pl.integer("budget"));
    pl.finish();
    ParamReader pw = r.p.child("pathwise");
    const System sys = resolve_system(pw.raw("system"), pw.child_path("system"));
    const auto k_list = pw.integers("k_list");
    const auto seeds = static_cast<std::uint64_t>(pw.integer("seeds"));
    const auto budget = static_cast<std::uint64_t>(pw.integer("budget"));
    pw.finish();
    const double tol_final = r.t.number("toy_final");
    if (toy_eps.size() < 2 || pl_eps.size() < 2 || k_list.size() < 2)
        throw Error(ErrorCode::ConfigInvalid, r.p.path() + ": each trend needs at least two points");

    // toy model: |median - target| shrinks from the largest to the smallest eps
    const auto toy_rows = toy_trend(toy_eps, toy_n, ctx.shared_sampler(), derive_seed(ctx.seed(15), 1, 0), ctx.config.workers);
    const double gap_first = std::abs(toy_rows.front().median - target);
    const double gap_last = std::abs(toy_rows.back().median - target);
    const bool toy_ok = gap_last < gap_first && gap_last <= tol_final;

    // planar walk: median tau grows as eps shrinks
    std::vector<std::size_t> order(pl_eps.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const auto pl_rows = planar_tau_trend(law, pl_eps, pl_n, pl_budget, derive_seed(ctx.seed(15), 2, 0), ctx.config.workers);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pl_rows[a].eps > pl_rows[b].eps; });
    bool planar_ok = true;
    for (std::size_t i = 1; i < order.size(); ++i) {
        const double prev = pl_rows[order[i - 1]].median_tau, cur = pl_rows[order[i]].median_tau;
        planar_ok = planar_ok && (cur > prev || (std::isinf(cur) && std::isinf(prev)));
    }

    // pathwise: tau_{e^{-k}} nondecreasing in k for every seed
    std::vector<int> ks = k_list;
    std::sort(ks.begin(), ks.end());
    std::size_t violations = 0;
    for (std::uint64_t s = 0; s < seeds; ++s) {
        const std::uint64_t seed = derive_seed(ctx.seed(15), 3, s);
        std::uint64_t prev = 0;
        bool prev_censored = false;
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const ReturnRecord rec = extension_return_time(sys.measure, sys.observable.value(), ks[i], seed, budget);
            if (i > 0) {
                const bool ok = rec.censored || (!prev_censored && rec.value >= prev);
                violations += ok ? 0 : 1;
            }
            prev = rec.value;
            prev_censored = rec.censored;
        }
    }
    const bool path_ok = violations == 0;

    CsvText csv({"part", "x", "median"});
    Json toy_json = Json::array(), pl_json = Json::array();
    for (const auto& row : toy_rows) {
        csv.cell(std::string("toy")).cell(row.x).cell(row.median);
        csv.end_row();
        toy_json.push_back({{"eps", row.x}, {"median", row.median}});
    }
    for (const auto& row : pl_rows) {
        csv.cell(std::string("planar")).cell(row.eps);
        std::isinf(row.median_tau) ? csv.cell(std::string("censored")) : csv.cell(row.median_tau);
        csv.end_row();
        pl_json.push_back({{"eps", row.eps}, {"median_tau", std::isinf(row.median_tau) ? Json(nullptr) : Json(row.median_tau)},
                           {"censored_fraction", row.censored_fraction}});
    }
    ctx.artifact(15, "trends.csv", csv.str());

    std::string toy_vals, pl_vals;
    for (const auto& row : toy_rows) toy_vals += (toy_vals.empty() ? "" : " ") + fmt(row.median);
    for (const auto& row : pl_rows) pl_vals += (pl_vals.empty() ? "" : " ") + (std::isinf(row.median_tau) ? std::string("inf") : fmt(row.median_tau));
    CriterionResult res;
    res.pass = toy_ok && planar_ok && path_ok;
    res.detail = std::string("toy medians ") + toy_vals + (toy_ok ? " ok" : " FAIL") + "; planar median tau " + pl_vals +
                 (planar_ok ? " ok" : " FAIL") + "; pathwise violations " + std::to_string(violations) + "/" +
                 std::to_string(seeds);
    res.metrics = {{"toy", toy_json}, {"planar", pl_json}, {"pathwise_violations", violations},
                   {"toy_ok", toy_ok}, {"planar_ok", planar_ok}, {"pathwise_ok", path_ok}};
    return res;
}

using CriterionFn = CriterionResult (*)(Context&, Readers&);
constexpr CriterionFn kCriteria[kCriterionCount] = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12, c13, c14, c15};

}  // namespace

const std::string& criterion_title(int id) {
    if (id < 1 || id > kCriterionCount) throw Error(ErrorCode::InvalidArgument, "criterion id out of range");
    return kTitles[static_cast<std::size_t>(id - 1)];
}

Json default_acceptance_config() { return Json::parse(kDefaultSuite); }

Json smoke_acceptance_config() { return Json::parse(kSmokeSuite); }

void run_acceptance(const ExperimentConfig& config, const RunOptions& options, RunResult& out) {
    if (!config.params.is_object()) throw Error(ErrorCode::ConfigInvalid, "$.params: expected an object");
    for (const auto& [key, value] : config.params.items()) {
        bool known = key == "sampler" || key == "criteria";
        for (int id = 1; id <= kCriterionCount && !known; ++id) known = key == "c" + std::to_string(id);
        if (!known) throw Error(ErrorCode::ConfigInvalid, "$.params." + key + ": unknown key");
    }
    for (const auto& [key, value] : config.tolerances.items()) {
        bool known = false;
        for (int id = 1; id <= kCriterionCount && !known; ++id) known = key == "c" + std::to_string(id);
        if (!known) throw Error(ErrorCode::ConfigInvalid, "$.tolerances." + key + ": unknown key");
    }
    std::vector<int> selected;
    if (config.params.contains("criteria")) {
        ParamReader top(config.params, "$.params");
        selected = top.integers("criteria");
    } else {
        for (int id = 1; id <= kCriterionCount; ++id) selected.push_back(id);
    }
    if (!options.only.empty()) {
        std::vector<int> keep;
        for (int id : selected)
            if (std::find(options.only.begin(), options.only.end(), id) != options.only.end()) keep.push_back(id);
        selected = keep;
    }
    for (int id : options.only)
        if (id < 1 || id > kCriterionCount) throw Error(ErrorCode::ConfigInvalid, "--only: criterion " + std::to_string(id) + " does not exist");

    Context ctx{config, options, out, std::nullopt};
    Json list = Json::array();
    for (int id : selected) {
        if (id < 1 || id > kCriterionCount)
            throw Error(ErrorCode::ConfigInvalid, "$.params.criteria: criterion " + std::to_string(id) + " does not exist");
        if (options.log) *options.log << "criterion " << id << ": " << criterion_title(id) << std::endl;
        Readers rd = readers(config, id);
        CriterionResult res;
        try {
            res = kCriteria[id - 1](ctx, rd);
            rd.p.finish();
            rd.t.finish();
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ConfigInvalid) throw;
            res.pass = false;
            res.detail = std::string("error: ") + e.what();
        }
        res.id = id;
        res.title = criterion_title(id);
        list.push_back({{"id", id}, {"pass", res.pass}, {"detail", res.detail}, {"metrics", res.metrics}});
        out.criteria.push_back(std::move(res));
    }
    out.summary["criteria"] = list;
    if (ctx.sampler) {
        out.summary["sampler"] = {{"cap", ctx.sampler->cap()},
                                  {"samples", ctx.sampler->total()},
                                  {"censored_fraction", ctx.sampler->censored_fraction()},
                                  {"tail_shift", ctx.sampler->tail_shift()}};
    }
}

}  // namespace recur2d
