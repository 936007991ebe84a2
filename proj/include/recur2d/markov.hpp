#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "recur2d/rng.hpp"
#include "recur2d/sft.hpp"

namespace recur2d {

/// Real table h(a, b) on admissible symbol pairs. Entries on forbidden pairs
/// are stored as 0 and never read.
struct PairPotential {
    Eigen::MatrixXd values;

    static PairPotential zero(const SftSpec& sft);
    static PairPotential from_function(const SftSpec& sft, const std::function<double(Symbol, Symbol)>& f);
    /// Single-coordinate function f(a) replicated across the second index.
    static PairPotential from_symbol_values(const SftSpec& sft, const std::vector<double>& f);
};

/// Potential on admissible words of length r, recoded to a pair potential on
/// the (r-1)-block presentation. Returns the block shift alongside.
struct RecodedPotential {
    SftSpec block_sft;
    PairPotential potential;
};
RecodedPotential recode_potential(const SftSpec& sft, int word_length,
                                  const std::function<double(std::span<const Symbol>)>& h);

/// Stationary Markov measure compatible with an SFT (the Gibbs measure of a
/// locally constant potential).
class MarkovMeasure {
public:
    /// Checks compatibility with the SFT, row sums and stationarity (1e-12).
    MarkovMeasure(SftSpec sft, Eigen::MatrixXd stochastic, Eigen::VectorXd stationary, double perron_value);

    const SftSpec& sft() const noexcept { return sft_; }
    std::size_t size() const noexcept { return sft_.size(); }
    const Eigen::MatrixXd& stochastic() const noexcept { return pi_; }
    const Eigen::VectorXd& stationary() const noexcept { return p_; }
    double transition(Symbol a, Symbol b) const noexcept { return pi_(a, b); }
    double perron_value() const noexcept { return lambda_; }
    double entropy() const noexcept { return entropy_; }
    /// Hausdorff dimension of the two-sided measure: twice the entropy.
    double dimension() const noexcept { return 2.0 * entropy_; }

    /// Time-reversed chain pi*_{ba} = p_a pi_{ab} / p_b.
    const Eigen::MatrixXd& reversed() const noexcept { return reversed_; }

    const AliasTable& stationary_sampler() const noexcept { return stationary_alias_; }
    const AliasTable& forward_sampler(Symbol a) const noexcept { return forward_alias_[a]; }
    const AliasTable& backward_sampler(Symbol b) const noexcept { return backward_alias_[b]; }

private:
    SftSpec sft_;
    Eigen::MatrixXd pi_;
    Eigen::VectorXd p_;
    Eigen::MatrixXd reversed_;
    double lambda_ = 1.0;
    double entropy_ = 0.0;
    AliasTable stationary_alias_;
    std::vector<AliasTable> forward_alias_;
    std::vector<AliasTable> backward_alias_;
};

struct PerronData {
    double value = 0.0;
    Eigen::VectorXd right;  // L r = value r, normalized to sum 1
    Eigen::VectorXd left;   // l L = value l, normalized so l.r = 1
};

/// Perron eigendata of a nonnegative primitive matrix by power iteration with
/// a relative Rayleigh-quotient stopping rule. Throws EigenSolverFailure.
PerronData perron_eigen(const Eigen::MatrixXd& l, double rel_tol = 1e-13, int max_iterations = 1'000'000);

/// Ruelle-Perron-Frobenius construction for a pair potential:
/// L_ab = M_ab e^{h(a,b)}, pi_ab = L_ab r_b / (lambda r_a), p_a proportional to l_a r_a.
MarkovMeasure gibbs_from_potential(const SftSpec& sft, const PairPotential& h);

/// Measure of the maximal entropy (h = 0).
MarkovMeasure max_entropy_measure(const SftSpec& sft);

struct CylinderMeasure {
    double log_value = 0.0;
    double value = 0.0;  // exp(log_value); may underflow to 0 for long windows
};

/// Two-sided: p_{x_-k} prod_{j=-k}^{k-1} pi_{x_j x_{j+1}}; one-sided: p_{x_0} prod pi.
/// Throws InadmissibleWindow.
CylinderMeasure cylinder_measure(const MarkovMeasure& m, const Window& w);

/// Lazily grown realization of a point x distributed as the measure. The
/// forward and backward halves use independent streams derived from the seed,
/// so window(k) is a function of the seed alone, whatever the growth order.
class LazyPoint {
public:
    LazyPoint(const MarkovMeasure& m, std::uint64_t seed);

    /// Two-sided window of radius k, growing the point as needed.
    Window window(int k);
    /// x_i for any integer i.
    Symbol at(std::int64_t i);
    std::int64_t forward_extent() const noexcept { return static_cast<std::int64_t>(forward_.size()) - 1; }
    std::int64_t backward_extent() const noexcept { return static_cast<std::int64_t>(backward_.size()); }

    /// Generator state just past the forward extent. Continuing with
    /// next() yields exactly the symbols at() would produce, without storing them.
    class Cursor {
    public:
        Symbol next() {
            last_ = static_cast<Symbol>(measure_->forward_sampler(last_).sample(rng_));
            ++index_;
            return last_;
        }
        std::int64_t index() const noexcept { return index_; }

    private:
        friend class LazyPoint;
        Cursor(const MarkovMeasure* m, Rng rng, Symbol last, std::int64_t index)
            : measure_(m), rng_(rng), last_(last), index_(index) {}
        const MarkovMeasure* measure_;
        Rng rng_;
        Symbol last_;
        std::int64_t index_;
    };
    Cursor cursor() const { return Cursor(measure_, forward_rng_, forward_.back(), forward_extent()); }

private:
    void grow_forward(std::int64_t to);
    void grow_backward(std::int64_t to);

    const MarkovMeasure* measure_;
    Rng forward_rng_;
    Rng backward_rng_;
    std::vector<Symbol> forward_;   // x_0, x_1, ...
    std::vector<Symbol> backward_;  // x_-1, x_-2, ...
};

/// Stationary path x_0..x_{length-1}, drawn left to right.
std::vector<Symbol> sample_path(const MarkovMeasure& m, std::size_t length, Rng& rng);

/// Centred f: f(a,b) - E[f(X0,X1)].
double pair_expectation(const MarkovMeasure& m, const Eigen::MatrixXd& f);

/// Fundamental matrix Z = (I - pi + 1 p)^{-1}. Throws SingularFundamentalMatrix.
Eigen::MatrixXd fundamental_matrix(const MarkovMeasure& m);

/// Green-Kubo cross term: lim Cov(S_n f, S_n g)/n for pair functions f, g,
/// evaluated exactly through the fundamental matrix. Not symmetrized.
double green_kubo(const MarkovMeasure& m, const Eigen::MatrixXd& f, const Eigen::MatrixXd& g,
                  const Eigen::MatrixXd& z);

/// Asymptotic variance of a pair function; tiny negatives (> -1e-10) clamp to 0.
double asymptotic_variance_scalar(const MarkovMeasure& m, const PairPotential& f);

/// log pi(a,b) as a pair function; the potential the measure is Gibbs for,
/// up to cohomology and an additive constant.
PairPotential log_transition_potential(const MarkovMeasure& m);

struct CltSamples {
    int k = 0;
    /// (log nu(C_k(x)) + k d) / sqrt(k), the normalization used in the statement.
    std::vector<double> raw;
    /// (log nu(C_k(x)) - E log nu(C_k)) / sqrt(k): exact finite-k centring.
    std::vector<double> corrected;
    /// E log nu(C_k) = sum_a p_a log p_a - 2k h.
    double exact_mean_log_measure = 0.0;
};

/// Fluctuations of log cylinder measures for x ~ nu; one derived seed per sample.
CltSamples clt_fluctuation_samples(const MarkovMeasure& m, int k, std::size_t n_samples,
                                   std::uint64_t seed, unsigned workers = 1);

}  // namespace recur2d
