#pragma once

#include <array>
#include <complex>
#include <vector>

#include "recur2d/markov.hpp"

namespace recur2d {

struct Vec2i {
    int x = 0;
    int y = 0;
    friend bool operator==(const Vec2i&, const Vec2i&) = default;
};

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

/// Z^2-valued step function psi(a, b) on admissible pairs.
class LatticeObservable {
public:
    static LatticeObservable from_symbol_values(const SftSpec& sft, const std::vector<Vec2i>& values);
    static LatticeObservable from_pairs(const SftSpec& sft, std::vector<Vec2i> pair_values);

    std::size_t size() const noexcept { return n_; }
    const Vec2i& operator()(Symbol a, Symbol b) const noexcept { return values_[a * n_ + b]; }
    /// max over admissible pairs of the sup-norm of psi.
    int max_norm() const noexcept { return max_norm_; }
    /// True when psi(a, b) does not depend on b.
    bool single_coordinate() const noexcept { return single_coordinate_; }
    /// Component `axis` as a real pair function.
    Eigen::MatrixXd component(int axis) const;

private:
    LatticeObservable(const SftSpec& sft, std::vector<Vec2i> values);

    std::size_t n_ = 0;
    std::vector<Vec2i> values_;
    int max_norm_ = 0;
    bool single_coordinate_ = true;
};

/// E_nu[psi].
Vec2 mean_drift(const MarkovMeasure& m, const LatticeObservable& phi);

struct CovarianceResult {
    Mat2 sigma{};
    double det = 0.0;
    /// Set when det(sigma) <= 1e-12 (max |entry| scaled); return-time code refuses these.
    bool singular = false;
};

/// Asymptotic covariance of S_n psi / sqrt(n) by Green-Kubo; symmetrized and
/// PSD-clamped. Throws NonzeroDrift when |E psi| > 1e-12.
CovarianceResult covariance_matrix(const MarkovMeasure& m, const LatticeObservable& phi);

/// 1 / (2 pi sqrt(det sigma)). Throws SingularCovariance.
double recurrence_beta(const CovarianceResult& cov);

/// Complex matrix (P_u)_ab = pi_ab exp(i u . psi(a,b)).
Eigen::MatrixXcd twisted_matrix(const MarkovMeasure& m, const LatticeObservable& phi, const Vec2& u);

/// Leading (largest modulus) eigenvalue of P_u; exactly 1 at u = 0.
std::complex<double> twisted_eigenvalue(const MarkovMeasure& m, const LatticeObservable& phi, const Vec2& u);

/// All eigenvalues of P_u sorted by decreasing modulus.
std::vector<std::complex<double>> twisted_spectrum(const MarkovMeasure& m, const LatticeObservable& phi,
                                                   const Vec2& u);

struct HessianResult {
    std::array<std::complex<double>, 2> grad{};
    Mat2 hessian{};               // real part of D^2 lambda at 0
    double hessian_imag_max = 0.0;  // largest |Im D^2 lambda| entry
    double deviation = 0.0;       // max |D^2 lambda + sigma| entry
    double step = 0.0;
};

/// Fourth-order central differences of lambda_u on a 5x5 stencil around 0.
HessianResult hessian_check(const MarkovMeasure& m, const LatticeObservable& phi, const CovarianceResult& cov,
                            double step);

struct ScanPoint {
    Vec2 u{};
    std::complex<double> lambda;
    double radius = 0.0;  // spectral radius of P_u
};

struct ScanResult {
    int grid_n = 0;
    double margin = 0.0;  // 1 - max radius over the grid without u = 0
    Vec2 argmax{};        // first maximizer in scan order, coordinates in (-pi, pi]
    std::vector<Vec2> argmax_set;  // all grid points within 1e-12 of the max
    std::vector<ScanPoint> points;
};

/// Spectral radius of P_u on {-pi + 2 pi j / grid_n}^2 \ {0}.
ScanResult nonarithmeticity_scan(const MarkovMeasure& m, const LatticeObservable& phi, int grid_n,
                                 unsigned workers = 1);

/// Largest modulus among eigenvalues of the stochastic matrix other than the
/// Perron eigenvalue 1.
double subleading_radius(const MarkovMeasure& m);

/// Largest c with |lambda_u| <= exp(-c |u|^2) over the given points (all u != 0).
double fit_quadratic_decay(const MarkovMeasure& m, const LatticeObservable& phi, const std::vector<Vec2>& us);

struct SpectralReport {
    CovarianceResult covariance;
    double beta = 0.0;
    HessianResult hessian;
    ScanResult scan;
    double subleading_radius = 0.0;
    double quadratic_decay = 0.0;
};

SpectralReport spectral_report(const MarkovMeasure& m, const LatticeObservable& phi, int grid_n, double step,
                               unsigned workers = 1);

}  // namespace recur2d
