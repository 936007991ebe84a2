#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "recur2d/rng.hpp"
#include "recur2d/spectral.hpp"
#include "recur2d/stats.hpp"

namespace recur2d {

/// i.i.d. step law of a planar random walk.
class PlanarWalkLaw {
public:
    enum class Tag { Gaussian, UniformDisc, LatticeSimple };

    /// N(0, sigma^2 I).
    static PlanarWalkLaw gaussian(double sigma = 1.0);
    /// Uniform on the disc of the given radius; covariance radius^2/4 I.
    static PlanarWalkLaw uniform_disc(double radius = 1.0);
    /// Uniform on {+-e1, +-e2}; lattice, so the Cramer flag is off.
    static PlanarWalkLaw lattice_simple();
    static PlanarWalkLaw by_name(const std::string& name, double scale = 1.0);

    Tag tag() const noexcept { return tag_; }
    std::string name() const;
    double scale() const noexcept { return scale_; }
    const Mat2& covariance() const noexcept { return cov_; }
    bool cramer_ok() const noexcept { return tag_ != Tag::LatticeSimple; }

    Vec2 sample(Rng& rng) const;
    /// P(|s + X| < eps) for one step X.
    double ball_probability(const Vec2& s, double eps) const;

private:
    Tag tag_ = Tag::Gaussian;
    double scale_ = 1.0;
    Mat2 cov_{};
};

/// P(|m + sigma Z| < eps), Z standard planar gaussian.
double gaussian_ball_probability(double centre_distance, double eps, double sigma);
/// Area of the intersection of two discs with radii r1, r2 at distance d.
double disc_intersection_area(double r1, double r2, double d);

struct PlanarProbCell {
    int n = 0;
    double eps = 0.0;
    double p = 0.0;
    double stderr_ = 0.0;
    double exact = -1.0;  // closed form when known (gaussian), else -1
};

struct PlanarProbResult {
    std::vector<PlanarProbCell> cells;
    std::vector<double> slope_n;        // per eps: slope of log P in log n
    std::vector<double> slope_n_stderr;
    std::vector<double> slope_eps;      // per n: slope of log P in log eps
    std::vector<double> slope_eps_stderr;
    bool certified = true;              // false for laws without the Cramer flag
};

/// Estimates P(|S_n| < eps) by conditioning on S_{n-1}: each trial contributes
/// the exact probability that the last step lands in the ball.
PlanarProbResult planar_return_prob(const PlanarWalkLaw& law, const std::vector<int>& n_list,
                                    const std::vector<double>& eps_list, std::size_t n_trials,
                                    std::uint64_t seed, unsigned workers = 1);

struct PlanarTauRow {
    double eps = 0.0;
    double median_tau = 0.0;    // +inf when at least half the trials are censored
    double median_ratio = 0.0;  // median log log tau / (-log eps); NaN at eps = 1
    double censored_fraction = 0.0;
};

/// tau_eps = min{n >= 1 : |S_n| < eps} by direct simulation, capped at `budget`.
std::vector<PlanarTauRow> planar_tau_trend(const PlanarWalkLaw& law, const std::vector<double>& eps_list,
                                           std::size_t n_trials, std::uint64_t budget, std::uint64_t seed,
                                           unsigned workers = 1);

}  // namespace recur2d
