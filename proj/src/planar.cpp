#include "recur2d/planar.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "recur2d/error.hpp"
#include "recur2d/parallel.hpp"

namespace recur2d {

namespace {

constexpr std::uint64_t kStreamProb = 0x9b;
constexpr std::uint64_t kStreamTau = 0x9c;

// 10-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 5> kGlNode{0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                                        0.8650633666889845, 0.9739065285171717};
constexpr std::array<double, 5> kGlWeight{0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                                          0.1494513491505806, 0.0666713443086881};

/// I_0(x) e^{-x} for x >= 0.
double scaled_bessel_i0(double x) {
    if (x < 700.0) return std::cyl_bessel_i(0.0, x) * std::exp(-x);
    const double y = 1.0 / (8.0 * x);
    return (1.0 + y * (1.0 + y * (4.5 + y * 37.5))) / std::sqrt(2.0 * std::numbers::pi * x);
}

}  // namespace

double gaussian_ball_probability(double centre_distance, double eps, double sigma) {
    if (!(sigma > 0.0) || eps < 0.0) throw Error(ErrorCode::InvalidArgument, "need sigma > 0 and eps >= 0");
    const double a = eps / sigma;
    const double rho = centre_distance / sigma;
    if (rho == 0.0) return -std::expm1(-0.5 * a * a);
    if (rho > a + 10.0) return 0.0;
    // Integral over r in [0, a] of r exp(-(r^2 + rho^2)/2) I_0(r rho).
    const int panels = std::max(1, static_cast<int>(std::ceil(a / 0.5)));
    const double h = a / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        const double half = 0.5 * h;
        for (std::size_t i = 0; i < kGlNode.size(); ++i)
            for (double sgn : {-1.0, 1.0}) {
                const double r = mid + sgn * half * kGlNode[i];
                const double d = r - rho;
                total += kGlWeight[i] * half * r * std::exp(-0.5 * d * d) * scaled_bessel_i0(r * rho);
            }
    }
    return total;
}

double disc_intersection_area(double r1, double r2, double d) {
    if (d >= r1 + r2) return 0.0;
    const double rmin = std::min(r1, r2);
    if (d <= std::abs(r1 - r2)) return std::numbers::pi * rmin * rmin;
    const double c1 = std::clamp((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1), -1.0, 1.0);
    const double c2 = std::clamp((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2), -1.0, 1.0);
    const double k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
    return r1 * r1 * std::acos(c1) + r2 * r2 * std::acos(c2) - 0.5 * std::sqrt(std::max(0.0, k));
}

PlanarWalkLaw PlanarWalkLaw::gaussian(double sigma) {
    if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
    PlanarWalkLaw l;
    l.tag_ = Tag::Gaussian;
    l.scale_ = sigma;
    l.cov_ = {{{sigma * sigma, 0.0}, {0.0, sigma * sigma}}};
    return l;
}

PlanarWalkLaw PlanarWalkLaw::uniform_disc(double radius) {
    if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
    PlanarWalkLaw l;
    l.tag_ = Tag::UniformDisc;
    l.scale_ = radius;
    l.cov_ = {{{radius * radius / 4.0, 0.0}, {0.0, radius * radius / 4.0}}};
    return l;
}

PlanarWalkLaw PlanarWalkLaw::lattice_simple() {
    PlanarWalkLaw l;
    l.tag_ = Tag::LatticeSimple;
    l.scale_ = 1.0;
    l.cov_ = {{{0.5, 0.0}, {0.0, 0.5}}};
    return l;
}

PlanarWalkLaw PlanarWalkLaw::by_name(const std::string& name, double scale) {
    if (name == "gaussian") return gaussian(scale);
    if (name == "uniform-disc") return uniform_disc(scale);
    if (name == "lattice-simple") return lattice_simple();
    throw Error(ErrorCode::InvalidArgument, "unknown step law '" + name + "'");
}

std::string PlanarWalkLaw::name() const {
    switch (tag_) {
        case Tag::Gaussian: return "gaussian";
        case Tag::UniformDisc: return "uniform-disc";
        case Tag::LatticeSimple: return "lattice-simple";
    }
    return "?";
}

Vec2 PlanarWalkLaw::sample(Rng& rng) const {
    switch (tag_) {
        case Tag::Gaussian: return {scale_ * rng.normal(), scale_ * rng.normal()};
        case Tag::UniformDisc: {
            const double r = scale_ * std::sqrt(rng.uniform());
            const double a = 2.0 * std::numbers::pi * rng.uniform();
            return {r * std::cos(a), r * std::sin(a)};
        }
        case Tag::LatticeSimple: {
            switch (rng.below(4)) {
                case 0: return {1.0, 0.0};
                case 1: return {-1.0, 0.0};
                case 2: return {0.0, 1.0};
                default: return {0.0, -1.0};
            }
        }
    }
    return {0.0, 0.0};
}

double PlanarWalkLaw::ball_probability(const Vec2& s, double eps) const {
    const double d = std::hypot(s[0], s[1]);
    switch (tag_) {
        case Tag::Gaussian: return gaussian_ball_probability(d, eps, scale_);
        case Tag::UniformDisc:
            return disc_intersection_area(eps, scale_, d) / (std::numbers::pi * scale_ * scale_);
        case Tag::LatticeSimple: {
            int hits = 0;
            for (const Vec2& x : {Vec2{1, 0}, Vec2{-1, 0}, Vec2{0, 1}, Vec2{0, -1}})
                if (std::hypot(s[0] + x[0], s[1] + x[1]) < eps) ++hits;
            return hits / 4.0;
        }
    }
    return 0.0;
}

PlanarProbResult planar_return_prob(const PlanarWalkLaw& law, const std::vector<int>& n_list,
                                    const std::vector<double>& eps_list, std::size_t n_trials,
                                    std::uint64_t seed, unsigned workers) {
    if (n_list.empty() || eps_list.empty() || n_trials < 2)
        throw Error(ErrorCode::InvalidArgument, "planar_return_prob needs n, eps and at least 2 trials");
    for (int n : n_list)
        if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be positive");
    for (double e : eps_list)
        if (!(e > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
    PlanarProbResult out;
    out.certified = law.cramer_ok();
    const std::size_t n_eps = eps_list.size();
    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
        const int n = n_list[ni];
        // values[i * n_eps + e]: all eps share the same S_{n-1}.
        std::vector<double> values(n_trials * n_eps);
        parallel_for(
            n_trials, workers,
            [&](std::size_t i) {
                Rng rng(derive_seed(seed, kStreamProb + static_cast<std::uint64_t>(ni) * 0x1000, i));
                Vec2 s{0.0, 0.0};
                if (law.tag() == PlanarWalkLaw::Tag::Gaussian) {
                    const double sd = law.scale() * std::sqrt(static_cast<double>(n - 1));
                    s = {sd * rng.normal(), sd * rng.normal()};
                } else {
                    for (int j = 0; j + 1 < n; ++j) {
                        const Vec2 x = law.sample(rng);
                        s[0] += x[0];
                        s[1] += x[1];
                    }
                }
                for (std::size_t e = 0; e < n_eps; ++e) values[i * n_eps + e] = law.ball_probability(s, eps_list[e]);
            },
            1024);
        for (std::size_t e = 0; e < n_eps; ++e) {
            double sum = 0.0, sum2 = 0.0;
            for (std::size_t i = 0; i < n_trials; ++i) {
                const double v = values[i * n_eps + e];
                sum += v;
                sum2 += v * v;
            }
            const double nt = static_cast<double>(n_trials);
            PlanarProbCell c;
            c.n = n;
            c.eps = eps_list[e];
            c.p = sum / nt;
            c.stderr_ = std::sqrt(std::max(0.0, (sum2 / nt - c.p * c.p) / (nt - 1.0)));
            if (law.tag() == PlanarWalkLaw::Tag::Gaussian) {
                const double var = law.scale() * law.scale() * n;
                c.exact = -std::expm1(-c.eps * c.eps / (2.0 * var));
            }
            out.cells.push_back(c);
        }
    }
    auto cell = [&](std::size_t ni, std::size_t e) -> const PlanarProbCell& { return out.cells[ni * n_eps + e]; };
    if (n_list.size() >= 3)
        for (std::size_t e = 0; e < n_eps; ++e) {
            std::vector<double> xs, ys;
            for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
                if (cell(ni, e).p <= 0.0) continue;
                xs.push_back(std::log(static_cast<double>(n_list[ni])));
                ys.push_back(std::log(cell(ni, e).p));
            }
            const auto r = slope_regression(xs, ys);
            out.slope_n.push_back(r.slope);
            out.slope_n_stderr.push_back(r.slope_stderr);
        }
    if (n_eps >= 3)
        for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
            std::vector<double> xs, ys;
            for (std::size_t e = 0; e < n_eps; ++e) {
                if (cell(ni, e).p <= 0.0) continue;
                xs.push_back(std::log(eps_list[e]));
                ys.push_back(std::log(cell(ni, e).p));
            }
            const auto r = slope_regression(xs, ys);
            out.slope_eps.push_back(r.slope);
            out.slope_eps_stderr.push_back(r.slope_stderr);
        }
    return out;
}

std::vector<PlanarTauRow> planar_tau_trend(const PlanarWalkLaw& law, const std::vector<double>& eps_list,
                                           std::size_t n_trials, std::uint64_t budget, std::uint64_t seed,
                                           unsigned workers) {
    if (n_trials == 0 || budget == 0) throw Error(ErrorCode::InvalidArgument, "need trials and a positive budget");
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<PlanarTauRow> rows;
    for (std::size_t ei = 0; ei < eps_list.size(); ++ei) {
        const double eps = eps_list[ei];
        if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
        const double eps2 = eps * eps;
        std::vector<double> tau(n_trials);
        parallel_for(
            n_trials, workers,
            [&](std::size_t i) {
                Rng rng(derive_seed(seed, kStreamTau + static_cast<std::uint64_t>(ei) * 0x1000, i));
                double x = 0.0, y = 0.0;
                tau[i] = inf;
                for (std::uint64_t n = 1; n <= budget; ++n) {
                    const Vec2 s = law.sample(rng);
                    x += s[0];
                    y += s[1];
                    if (x * x + y * y < eps2) {
                        tau[i] = static_cast<double>(n);
                        break;
                    }
                }
            },
            4);
        PlanarTauRow row;
        row.eps = eps;
        std::size_t cens = 0;
        for (double t : tau) cens += std::isinf(t) ? 1 : 0;
        row.censored_fraction = static_cast<double>(cens) / static_cast<double>(n_trials);
        row.median_tau = median(tau);
        const double neg_log_eps = -std::log(eps);
        if (neg_log_eps > 0.0) {
            std::vector<double> ratio(n_trials);
            for (std::size_t i = 0; i < n_trials; ++i) ratio[i] = std::log(std::log(tau[i])) / neg_log_eps;
            row.median_ratio = median(std::move(ratio));
        } else {
            row.median_ratio = std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace recur2d
