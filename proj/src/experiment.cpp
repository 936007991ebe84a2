#include "recur2d/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "recur2d/acceptance.hpp"
#include "recur2d/llt.hpp"
#include "recur2d/planar.hpp"
#include "recur2d/recurrence.hpp"
#include "recur2d/toy.hpp"

#ifndef RECUR2D_VERSION
#define RECUR2D_VERSION "0.0.0"
#endif

namespace recur2d {

namespace {

constexpr std::uint64_t kStreamSampler = 0x5a5a;

void note(const RunOptions& o, const std::string& line) {
    if (o.log) *o.log << line << std::endl;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json measure_json(const System& s) {
    const auto& m = s.measure;
    Json j;
    j["symbols"] = m.sft().symbols();
    std::vector<std::vector<double>> pi;
    for (Eigen::Index a = 0; a < m.stochastic().rows(); ++a) {
        std::vector<double> row;
        for (Eigen::Index b = 0; b < m.stochastic().cols(); ++b) row.push_back(m.stochastic()(a, b));
        pi.push_back(row);
    }
    j["stochastic"] = pi;
    j["stationary"] = std::vector<double>(m.stationary().data(), m.stationary().data() + m.stationary().size());
    j["perron_value"] = m.perron_value();
    j["entropy"] = m.entropy();
    j["dimension"] = m.dimension();
    return j;
}

Json mat2_json(const Mat2& m) { return Json::array({{m[0][0], m[0][1]}, {m[1][0], m[1][1]}}); }

const LatticeObservable& require_observable(const System& s) {
    if (!s.observable) throw Error(ErrorCode::ConfigInvalid, "$.system: this experiment needs an observable");
    return *s.observable;
}

std::uint64_t to_u64(std::int64_t v, const std::string& path) {
    if (v < 1) throw Error(ErrorCode::ConfigInvalid, path + ": must be positive");
    return static_cast<std::uint64_t>(v);
}

HeavyTailReturnSampler sampler_from(ParamReader r, std::uint64_t seed, unsigned workers, const RunOptions& o) {
    const std::string tail = r.string("tail", "shifted");
    if (tail != "shifted" && tail != "literal") throw Error(ErrorCode::ConfigInvalid, r.child_path("tail") + ": shifted or literal");
    const auto kind = tail == "literal" ? HeavyTailReturnSampler::Tail::Literal : HeavyTailReturnSampler::Tail::Shifted;
    if (r.has("path")) {
        const std::string path = r.string("path");
        r.finish();
        note(o, "loading sampler " + path);
        return HeavyTailReturnSampler::load(path);
    }
    const auto cap = to_u64(r.integer("cap", 1000000), r.child_path("cap"));
    const auto n = to_u64(r.integer("samples", 100000), r.child_path("samples"));
    r.finish();
    note(o, "building sampler: cap " + std::to_string(cap) + ", " + std::to_string(n) + " returns");
    return HeavyTailReturnSampler::build(cap, n, derive_seed(seed, kStreamSampler, 0), workers, kind);
}

Json sampler_json(const HeavyTailReturnSampler& s) {
    return {{"cap", s.cap()},
            {"samples", s.total()},
            {"uncensored", s.uncensored()},
            {"censored_fraction", s.censored_fraction()},
            {"tail", s.tail() == HeavyTailReturnSampler::Tail::Shifted ? "shifted" : "literal"},
            {"tail_shift", s.tail_shift()},
            {"tail_note", "draws above the cap come from the analytic tail model, not simulation"}};
}

void run_spectral(const ExperimentConfig& c, ParamReader& p, RunResult& out, const RunOptions&) {
    const int grid_n = static_cast<int>(p.integer("grid_n", 64));
    const double step = p.number("step", 1e-3);
    p.finish();
    const System sys = resolve_system(c.system);
    const auto& phi = require_observable(sys);
    const SpectralReport rep = spectral_report(sys.measure, phi, grid_n, step, c.workers);
    Json& s = out.summary;
    s["system"] = sys.name;
    s["measure"] = measure_json(sys);
    s["sigma_phi2"] = mat2_json(rep.covariance.sigma);
    s["det_sigma"] = rep.covariance.det;
    s["singular"] = rep.covariance.singular;
    s["beta"] = rep.covariance.singular ? Json(nullptr) : Json(rep.beta);
    s["grad_at_zero"] = Json::array({{rep.hessian.grad[0].real(), rep.hessian.grad[0].imag()},
                                     {rep.hessian.grad[1].real(), rep.hessian.grad[1].imag()}});
    s["hessian_at_zero"] = mat2_json(rep.hessian.hessian);
    s["hessian_imag_max"] = rep.hessian.hessian_imag_max;
    s["hessian_deviation"] = rep.hessian.deviation;
    s["step"] = step;
    s["grid_n"] = grid_n;
    s["nonarith_margin"] = rep.scan.margin;
    s["argmax"] = rep.scan.argmax;
    s["argmax_set"] = rep.scan.argmax_set;
    s["subleading_radius"] = rep.subleading_radius;
    s["quadratic_decay"] = rep.quadratic_decay;
    CsvText csv({"u1", "u2", "re_lambda", "im_lambda", "abs_lambda"});
    for (const auto& pt : rep.scan.points) {
        csv.cell(pt.u[0]).cell(pt.u[1]).cell(pt.lambda.real()).cell(pt.lambda.imag()).cell(pt.radius);
        csv.end_row();
    }
    out.artifacts.push_back({"scan.csv", csv.str()});
}

void run_llt(const ExperimentConfig& c, ParamReader& p, RunResult& out, const RunOptions& o) {
    const System sys = resolve_system(c.system);
    const auto& phi = require_observable(sys);
    const int n = static_cast<int>(p.integer("n", 500));
    const auto checkpoints = p.integers("checkpoints", std::vector<int>{n});
    const auto budget = to_u64(p.integer("budget_bytes", static_cast<std::int64_t>(kDefaultDpBudgetBytes)),
                               p.child_path("budget_bytes"));
    const bool write_table = p.boolean("write_table", false);
    std::optional<Window> start;
    if (p.has("start")) {
        ParamReader sr = p.child("start");
        const bool two = sr.boolean("two_sided", true);
        start = parse_window(sys.measure.sft(), sr.raw("letters"), two, sr.child_path("letters"));
        sr.finish();
    }
    std::optional<Json> conditional;
    std::optional<Window> a, b;
    int k = 0;
    if (p.has("conditional")) {
        ParamReader cr = p.child("conditional");
        if (cr.has("A")) a = parse_window(sys.measure.sft(), cr.raw("A"), true, cr.child_path("A"));
        if (cr.has("B")) b = parse_window(sys.measure.sft(), cr.raw("B"), false, cr.child_path("B"));
        k = static_cast<int>(cr.integer("k", 10));
        cr.finish();
        conditional = Json::object();
    }
    p.finish();
    for (int t : checkpoints)
        if (t < 1 || t > n) throw Error(ErrorCode::ConfigInvalid, p.child_path("checkpoints") + ": must lie in 1..n");

    note(o, "displacement DP to n = " + std::to_string(n));
    const DisplacementTable table = displacement_distribution(sys.measure, phi, n, start, budget);
    const auto cov = covariance_matrix(sys.measure, phi);
    const double beta = cov.singular ? 0.0 : recurrence_beta(cov);
    Json& s = out.summary;
    s["system"] = sys.name;
    s["n"] = n;
    s["mass"] = table.mass();
    s["beta"] = cov.singular ? Json(nullptr) : Json(beta);
    if (start) s["start"] = start->to_string(sys.measure.sft());
    Json rows = Json::array();
    for (int t : checkpoints) {
        const double pz = table.zero_series()[static_cast<std::size_t>(t)];
        Json row{{"n", t}, {"p_zero", pz}, {"n_p_zero", t * pz}};
        if (!cov.singular) row["relative_deviation"] = std::abs(t * pz - beta) / beta;
        rows.push_back(row);
    }
    s["checkpoints"] = rows;
    CsvText zs({"t", "p_zero", "t_p_zero"});
    for (std::size_t t = 0; t < table.zero_series().size(); ++t) {
        zs.cell(static_cast<std::int64_t>(t)).cell(table.zero_series()[t]).cell(static_cast<double>(t) * table.zero_series()[t]);
        zs.end_row();
    }
    out.artifacts.push_back({"zero_series.csv", zs.str()});
    if (write_table) {
        std::ostringstream os;
        table.write_csv(os, sys.measure.sft());
        out.artifacts.push_back({"table.csv", os.str()});
    }
    if (conditional) {
        note(o, "conditioned DP at n = " + std::to_string(n) + ", k = " + std::to_string(k));
        const LltCheck chk = llt_conditional_check(sys.measure, phi, a, b, n, k, budget);
        s["conditional"] = {{"A", a ? Json(a->to_string(sys.measure.sft())) : Json(nullptr)},
                            {"B", b ? Json(b->to_string(sys.measure.sft())) : Json(nullptr)},
                            {"n", chk.n},
                            {"k", chk.k},
                            {"nu_A", chk.nu_a},
                            {"nu_B", chk.nu_b},
                            {"exact", chk.exact},
                            {"main_term", chk.main_term},
                            {"abs_error", chk.abs_error},
                            {"ratio", chk.ratio},
                            {"relative_deviation", chk.relative_deviation},
                            {"scaled_error", chk.scaled_error}};
    }
}

void run_hirata(const ExperimentConfig& c, ParamReader& p, RunResult& out, const RunOptions& o) {
    const System sys = resolve_system(c.system);
    const auto ks_list = p.integers("k_list", std::vector<int>{1, 2, 3});
    const auto samples = to_u64(p.integer("samples", 10000), p.child_path("samples"));
    const double factor = p.number("budget_factor", 50.0);
    const std::string mode = p.string("mode", "conditional");
    if (mode != "conditional" && mode != "unconditional")
        throw Error(ErrorCode::ConfigInvalid, p.child_path("mode") + ": conditional or unconditional");
    std::vector<std::optional<Window>> windows(ks_list.size());
    if (p.has("windows")) {
        const Json& ws = p.raw("windows");
        if (!ws.is_array() || ws.size() != ks_list.size())
            throw Error(ErrorCode::ConfigInvalid, p.child_path("windows") + ": one window per k");
        for (std::size_t i = 0; i < ws.size(); ++i)
            windows[i] = parse_window(sys.measure.sft(), ws[i], true, p.child_path("windows") + "[" + std::to_string(i) + "]");
    }
    p.finish();
    std::vector<ReturnRecord> all;
    Json rows = Json::array();
    for (std::size_t i = 0; i < ks_list.size(); ++i) {
        const int k = ks_list[i];
        std::optional<Window> w;
        if (mode == "conditional") w = windows[i] ? windows[i] : non_overlapping_window(sys.measure.sft(), k);
        note(o, "hirata k = " + std::to_string(k));
        const HirataResult h = hirata_experiment(sys.measure, k, w, samples, derive_seed(c.seed, 0x41, static_cast<std::uint64_t>(k)),
                                                 factor, c.workers);
        std::size_t cens = 0;
        for (bool b : h.censored) cens += b ? 1 : 0;
        rows.push_back({{"k", k},
                        {"window", w ? Json(w->to_string(sys.measure.sft())) : Json(nullptr)},
                        {"ks", h.ks.distance},
                        {"coverage", h.ks.coverage},
                        {"censored_fraction", static_cast<double>(cens) / static_cast<double>(samples)}});
        all.insert(all.end(), h.records.begin(), h.records.end());
    }
    out.summary["system"] = sys.name;
    out.summary["mode"] = mode;
    out.summary["reference"] = "exponential(1)";
    out.summary["rows"] = rows;
    std::ostringstream os;
    write_records_csv(os, all);
    out.artifacts.push_back({"records.csv", os.str()});
}

void run_tau_tail(const ExperimentConfig& c, ParamReader& p, RunResult& out, const RunOptions& o) {
    const System sys = resolve_system(c.system);
    const auto& phi = require_observable(sys);
    const int k = static_cast<int>(p.integer("k", 1));
    const auto t_list = p.numbers("t_list", std::vector<double>{0.02, 0.05, 0.1});
    const auto n_traj = to_u64(p.integer("trajectories", 100000), p.child_path("trajectories"));
    const double ceiling = p.number("step_ceiling", 1e7);
    p.finish();
    note(o, "lower tail: " + std::to_string(n_traj) + " trajectories at k = " + std::to_string(k));
    const LowerTailResult r = theorem8_lower_tail(sys.measure, phi, k, t_list, n_traj, c.seed, ceiling, c.workers);
    out.summary["system"] = sys.name;
    out.summary["k"] = k;
    out.summary["beta"] = r.beta;
    out.summary["censored_fraction"] = r.censored_fraction;
    out.summary["max_budget"] = r.max_budget;
    CsvText csv({"t", "empirical", "stderr", "limit"});
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        csv.cell(row.t).cell(row.empirical).cell(row.stderr_).cell(row.limit);
        csv.end_row();
        rows.push_back({{"t", row.t}, {"empirical", row.empirical}, {"stderr", row.stderr_}, {"limit", row.limit}});
    }
    out.summary["rows"] = rows;
    out.artifacts.push_back({"tail.csv", csv.str()});
    std::ostringstream os;
    write_records_csv(os, r.records);
    out.artifacts.push_back({"records.csv", os.str()});
}

void run_clt(const ExperimentConfig& c, ParamReader& p, RunResult& out, const RunOptions& o) {
    const System sys = resolve_system(c.system);
    const int k = static_cast<int>(p.integer("k", 200));
    const auto samples = to_u64(p.integer("samples", 10000), p.child_path("samples"));
    p.finish();
    note(o, "clt samples at k = " + std::to_string(k));
    const CltSamples cs = clt_fluctuation_samples(sys.measure, k, samples, c.seed, c.workers);
    const double sigma2 = asymptotic_variance_scalar(sys.measure, log_transition_potential(sys.measure));
    out.summary["system"] = sys.name;
    out.summary["k"] = k;
    out.summary["sigma_h2"] = sigma2;
    out.summary["exact_mean_log_measure"] = cs.exact_mean_log_measure;
    out.summary["mean_raw"] = mean(cs.raw);
    out.summary["mean_corrected"] = mean(cs.corrected);
    if (sigma2 > 0.0) {
        const auto ref = ReferenceCdf::normal(2.0 * sigma2);
        out.summary["ks_raw"] = ks_distance(Ecdf(cs.raw), ref).distance;
        out.summary["ks_corrected"] = ks_distance(Ecdf(cs.corrected), ref).distance;
    }
    CsvText csv({"raw", "corrected"});
    for (std::size_t i = 0; i < cs.raw.size(); ++i) {
        csv.cell(cs.raw[i]).cell(cs.corrected[i]);
        csv.end_row();
    }
    out.artifacts.push_back({"samples.csv", csv.str()});
}

void run_qmatrix(const ExperimentConfig& c, ParamReader& p, RunResult& out, const RunOptions&) {
    const System sys = resolve_system(c.system);
    const auto k_list = p.integers("k_list", std::vector<int>{2, 3, 4, 5, 6});
    const auto max_windows = to_u64(p.integer("max_windows", 200000), p.child_path("max_windows"));
    double beta = 1.0;
    if (p.has("beta")) beta = p.number("beta");
    else if (sys.observable) {
        const auto cov = covariance_matrix(sys.measure, *sys.observable);
        if (!cov.singular) beta = recurrence_beta(cov);
    }
    const auto t_list = p.numbers("t_list", std::vector<double>{0.1, 0.5, 1.0, 2.0, 5.0, 10.0});
    p.finish();
    const QMatrixReport q = q_matrix(sys.measure, k_list, max_windows, c.seed);
    auto mat = [](const Eigen::MatrixXd& m) {
        std::vector<std::vector<double>> v;
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            std::vector<double> row;
            for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
            v.push_back(row);
        }
        return v;
    };
    out.summary["system"] = sys.name;
    out.summary["q"] = mat(q.q);
    out.summary["closed_form"] = mat(q.closed_form);
    out.summary["constancy_deviation"] = q.constancy_deviation;
    out.summary["dimension"] = q.dimension;
    out.summary["windows_checked"] = q.windows_checked;
    out.summary["beta"] = beta;
    const ReferenceCdf mix = q.mixture(beta);
    CsvText csv({"t", "mixture_cdf"});
    for (double t : t_list) {
        csv.cell(t).cell(mix(t));
        csv.end_row();
    }
    out.artifacts.push_back({"mixture.csv", csv.str()});
}

void run_toy(const ExperimentConfig& c, ParamReader& p, RunResult& out, const RunOptions& o) {
    const HeavyTailReturnSampler sampler = sampler_from(p.child("sampler"), c.seed, c.workers, o);
    const double delta = p.number("delta", 1e-3);
    const auto t_list = p.numbers("t_list", std::vector<double>{1.0, std::numbers::pi, 10.0});
    const auto trials = to_u64(p.integer("trials", 100000), p.child_path("trials"));
    std::optional<std::pair<std::vector<int>, std::uint64_t>> sums;
    if (p.has("sum_median")) {
        ParamReader lr = p.child("sum_median");
        sums = {lr.integers("n_list", std::vector<int>{100, 1000, 10000}),
                  to_u64(lr.integer("trials", 10000), lr.child_path("trials"))};
        lr.finish();
    }
    std::optional<std::pair<std::vector<double>, std::uint64_t>> trend;
    if (p.has("trend")) {
        ParamReader tr = p.child("trend");
        trend = {tr.numbers("eps_list", std::vector<double>{std::exp(-1.0), std::exp(-2.0), std::exp(-3.0)}),
                 to_u64(tr.integer("trials", 10000), tr.child_path("trials"))};
        tr.finish();
    }
    p.finish();
    out.summary["sampler"] = sampler_json(sampler);
    note(o, "toy tau cdf, delta = " + format_number(delta));
    const ToyTauResult r = toy_tau_cdf(delta, t_list, trials, sampler, derive_seed(c.seed, 0x70, 0), c.workers);
    CsvText csv({"t", "empirical", "stderr", "limit"});
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        csv.cell(row.t).cell(row.empirical).cell(row.stderr_).cell(row.limit);
        csv.end_row();
        rows.push_back({{"t", row.t}, {"empirical", row.empirical}, {"stderr", row.stderr_}, {"limit", row.limit}});
    }
    out.summary["delta"] = delta;
    out.summary["rows"] = rows;
    out.artifacts.push_back({"tau.csv", csv.str()});
    if (sums) {
        const auto m = lemma3_median_check(sums->first, sums->second, sampler, derive_seed(c.seed, 0x71, 0), c.workers);
        CsvText l({"n", "median_loglog_ratio"});
        Json lr = Json::array();
        for (const auto& row : m) {
            l.cell(static_cast<std::int64_t>(row.x)).cell(row.median);
            l.end_row();
            lr.push_back({{"n", row.x}, {"median", row.median}});
        }
        out.summary["sum_median"] = lr;
        out.artifacts.push_back({"sum_median.csv", l.str()});
    }
    if (trend) {
        const auto m = toy_trend(trend->first, trend->second, sampler, derive_seed(c.seed, 0x72, 0), c.workers);
        CsvText t({"eps", "median_ratio"});
        Json tr = Json::array();
        for (const auto& row : m) {
            t.cell(row.x).cell(row.median);
            t.end_row();
            tr.push_back({{"eps", row.x}, {"median", row.median}});
        }
        out.summary["trend"] = tr;
        out.artifacts.push_back({"trend.csv", t.str()});
    }
}

void run_toy_verify(const ExperimentConfig& c, ParamReader& p, RunResult& out, const RunOptions& o) {
    const double eps = p.number("epsilon", 0.2);
    const auto trials = to_u64(p.integer("trials", 10000), p.child_path("trials"));
    const auto budget = to_u64(p.integer("budget", 100000), p.child_path("budget"));
    p.finish();
    note(o, "toy direct vs decomposed, eps = " + format_number(eps));
    const ToyVerifyResult r = toy_direct_vs_decomposed(eps, trials, c.seed, budget, c.workers);
    out.summary["epsilon"] = eps;
    out.summary["budget"] = budget;
    out.summary["ks"] = r.ks;
    out.summary["direct_flagged"] = r.direct_flagged;
    out.summary["decomposed_flagged"] = r.decomposed_flagged;
    out.summary["direct_censored"] = r.direct_censored;
    out.summary["decomposed_censored"] = r.decomposed_censored;
    CsvText csv({"trial", "direct_log_tau", "decomposed_log_tau"});
    for (std::size_t i = 0; i < r.direct_log.size(); ++i) {
        csv.cell(static_cast<std::int64_t>(i));
        std::isinf(r.direct_log[i]) ? csv.cell(std::string("censored")) : csv.cell(r.direct_log[i]);
        std::isinf(r.decomposed_log[i]) ? csv.cell(std::string("censored")) : csv.cell(r.decomposed_log[i]);
        csv.end_row();
    }
    out.artifacts.push_back({"trials.csv", csv.str()});
}

PlanarWalkLaw law_from(ParamReader& p) {
    const std::string name = p.string("law", "gaussian");
    const double scale = p.number("scale", 1.0);
    try {
        return PlanarWalkLaw::by_name(name, scale);
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigInvalid, p.child_path("law") + ": " + e.what());
    }
}

void run_planar_prob(const ExperimentConfig& c, ParamReader& p, RunResult& out, const RunOptions& o) {
    const PlanarWalkLaw law = law_from(p);
    const auto n_list = p.integers("n_list", std::vector<int>{100, 1000, 10000});
    const auto eps_list = p.numbers("eps_list", std::vector<double>{0.05, 0.1, 0.2, 0.4});
    const auto trials = to_u64(p.integer("trials", 1000000), p.child_path("trials"));
    p.finish();
    note(o, "planar return probabilities, " + law.name());
    const PlanarProbResult r = planar_return_prob(law, n_list, eps_list, trials, c.seed, c.workers);
    CsvText csv({"n", "eps", "p", "stderr", "exact"});
    for (const auto& cell : r.cells) {
        csv.cell(static_cast<std::int64_t>(cell.n)).cell(cell.eps).cell(cell.p).cell(cell.stderr_);
        cell.exact >= 0.0 ? csv.cell(cell.exact) : csv.cell(std::string(""));
        csv.end_row();
    }
    out.artifacts.push_back({"prob.csv", csv.str()});
    out.summary["law"] = law.name();
    out.summary["cramer_ok"] = law.cramer_ok();
    out.summary["certified"] = r.certified;
    out.summary["slope_n"] = r.slope_n;
    out.summary["slope_n_stderr"] = r.slope_n_stderr;
    out.summary["slope_eps"] = r.slope_eps;
    out.summary["slope_eps_stderr"] = r.slope_eps_stderr;
}

void run_planar_tau(const ExperimentConfig& c, ParamReader& p, RunResult& out, const RunOptions& o) {
    const PlanarWalkLaw law = law_from(p);
    const auto eps_list = p.numbers("eps_list", std::vector<double>{1.0, 0.8, 0.6, 0.5, 0.4});
    const auto trials = to_u64(p.integer("trials", 400), p.child_path("trials"));
    const auto budget = to_u64(p.integer("budget", 2000000), p.child_path("budget"));
    p.finish();
    note(o, "planar tau trend, " + law.name());
    const auto rows = planar_tau_trend(law, eps_list, trials, budget, c.seed, c.workers);
    CsvText csv({"eps", "median_tau", "median_ratio", "censored_fraction"});
    Json js = Json::array();
    for (const auto& r : rows) {
        csv.cell(r.eps);
        std::isinf(r.median_tau) ? csv.cell(std::string("censored")) : csv.cell(r.median_tau);
        std::isfinite(r.median_ratio) ? csv.cell(r.median_ratio) : csv.cell(std::string(""));
        csv.cell(r.censored_fraction);
        csv.end_row();
        js.push_back({{"eps", r.eps},
                      {"median_tau", number_or_null(r.median_tau)},
                      {"median_ratio", number_or_null(r.median_ratio)},
                      {"censored_fraction", r.censored_fraction}});
    }
    out.summary["law"] = law.name();
    out.summary["budget"] = budget;
    out.summary["rows"] = js;
    out.artifacts.push_back({"tau.csv", csv.str()});
}

void run_sampler_build(const ExperimentConfig& c, ParamReader& p, RunResult& out, const RunOptions& o) {
    const std::string file = p.string("file", "sampler.txt");
    if (file.empty() || file.find('/') != std::string::npos)
        throw Error(ErrorCode::ConfigInvalid, p.child_path("file") + ": plain file name expected");
    ParamReader sr(p.raw("sampler"), p.child_path("sampler"));
    const HeavyTailReturnSampler s = sampler_from(std::move(sr), c.seed, c.workers, o);
    p.finish();
    std::ostringstream os;
    s.write(os);
    out.artifacts.push_back({file, os.str()});
    out.summary["sampler"] = sampler_json(s);
    out.summary["p_gt_1e4"] = s.cap() > 10000 ? Json(s.empirical_survival(1e4)) : Json(nullptr);
}

Json canonical_config(const ExperimentConfig& c) {
    Json j = c.to_json();
    j.erase("workers");
    return j;
}

}  // namespace

bool RunResult::passed() const {
    for (const auto& c : criteria)
        if (!c.pass) return false;
    return true;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

CsvText::CsvText(const std::vector<std::string>& header) {
    for (const auto& h : header) cell(h);
    end_row();
}

CsvText& CsvText::cell(double v) { return cell(format_number(v)); }

CsvText& CsvText::cell(std::int64_t v) { return cell(std::to_string(v)); }

CsvText& CsvText::cell(const std::string& v) {
    if (!first_) text_ += ',';
    text_ += v;
    first_ = false;
    return *this;
}

void CsvText::end_row() {
    text_ += '\n';
    first_ = true;
}

RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    RunResult out;
    out.kind = config.kind;
    ParamReader params(config.params, "$.params");
    if (config.kind == "accept") {
        run_acceptance(config, options, out);
    } else {
        ParamReader tol(config.tolerances, "$.tolerances");
        tol.finish();  // only the acceptance suite has thresholds
        if (config.kind == "spectral") run_spectral(config, params, out, options);
        else if (config.kind == "llt") run_llt(config, params, out, options);
        else if (config.kind == "hirata") run_hirata(config, params, out, options);
        else if (config.kind == "tau-tail") run_tau_tail(config, params, out, options);
        else if (config.kind == "clt") run_clt(config, params, out, options);
        else if (config.kind == "qmatrix") run_qmatrix(config, params, out, options);
        else if (config.kind == "toy") run_toy(config, params, out, options);
        else if (config.kind == "toy-verify") run_toy_verify(config, params, out, options);
        else if (config.kind == "planar-prob") run_planar_prob(config, params, out, options);
        else if (config.kind == "planar-tau") run_planar_tau(config, params, out, options);
        else if (config.kind == "sampler-build") run_sampler_build(config, params, out, options);
        else throw Error(ErrorCode::ConfigInvalid, "$.kind: unknown experiment kind '" + config.kind + "'");
    }
    out.summary["schema_version"] = kSchemaVersion;
    out.summary["kind"] = config.kind;

    Json& m = out.manifest;
    m["schema_version"] = kSchemaVersion;
    m["tool"] = "recur2d";
    m["version"] = RECUR2D_VERSION;
    m["kind"] = config.kind;
    m["seed"] = config.seed;
    m["config_digest"] = fnv1a_hex(canonical_config(config).dump());
    m["summary_digest"] = fnv1a_hex(out.summary.dump());
    Json arts = Json::array();
    for (const auto& a : out.artifacts) arts.push_back({{"name", a.name}, {"digest", fnv1a_hex(a.content)}, {"bytes", a.content.size()}});
    m["artifacts"] = arts;
    Json crit = Json::array();
    for (const auto& c : out.criteria)
        crit.push_back({{"id", c.id}, {"title", c.title}, {"pass", c.pass}, {"detail", c.detail}, {"metrics", c.metrics}});
    m["criteria"] = crit;
    m["passed"] = out.passed();
    // Digest over everything that must not depend on scheduling.
    m["manifest_digest"] = fnv1a_hex(m.dump());
    m["workers"] = config.workers;
    m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

void write_outputs(const RunResult& result, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir + ": " + ec.message());
    auto put = [&](const std::string& name, const std::string& text) {
        std::ofstream os(fs::path(dir) / name, std::ios::binary);
        if (!os) throw Error(ErrorCode::Io, "cannot write " + (fs::path(dir) / name).string());
        os << text;
        if (!os) throw Error(ErrorCode::Io, "write failed for " + name);
    };
    for (const auto& a : result.artifacts) put(a.name, a.content);
    put("summary.json", result.summary.dump(2) + "\n");
    put("manifest.json", result.manifest.dump(2) + "\n");
}

Json default_config(const std::string& kind) {
    if (kind == "accept") return default_acceptance_config();
    Json j{{"schema_version", kSchemaVersion}, {"kind", kind}, {"seed", 20240601}, {"workers", 1}, {"params", Json::object()}};
    if (kind == "spectral" || kind == "llt" || kind == "hirata" || kind == "tau-tail") j["system"] = "lazy5";
    else if (kind == "clt") j["system"] = "markov5";
    else if (kind == "qmatrix") j["system"] = "golden_mean";
    else if (kind == "sampler-build") j["params"] = {{"sampler", {{"cap", 1000000}, {"samples", 100000}}}};
    else if (kind == "toy" || kind == "toy-verify" || kind == "planar-prob" || kind == "planar-tau") {
    } else {
        throw Error(ErrorCode::ConfigInvalid, "$.kind: unknown experiment kind '" + kind + "'");
    }
    return j;
}

}  // namespace recur2d
