#include "recur2d/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "recur2d/error.hpp"
#include "recur2d/parallel.hpp"

namespace recur2d {

LatticeObservable::LatticeObservable(const SftSpec& sft, std::vector<Vec2i> values)
    : n_(sft.size()), values_(std::move(values)) {
    if (values_.size() != n_ * n_) throw Error(ErrorCode::InvalidArgument, "observable table has the wrong size");
    for (std::size_t a = 0; a < n_; ++a)
        for (std::size_t b = 0; b < n_; ++b) {
            if (!sft.admissible(static_cast<Symbol>(a), static_cast<Symbol>(b))) {
                values_[a * n_ + b] = {};
                continue;
            }
            const Vec2i& v = values_[a * n_ + b];
            max_norm_ = std::max({max_norm_, std::abs(v.x), std::abs(v.y)});
        }
    for (std::size_t a = 0; a < n_ && single_coordinate_; ++a) {
        const Vec2i* first = nullptr;
        for (std::size_t b = 0; b < n_; ++b) {
            if (!sft.admissible(static_cast<Symbol>(a), static_cast<Symbol>(b))) continue;
            if (!first) first = &values_[a * n_ + b];
            else if (!(*first == values_[a * n_ + b])) {
                single_coordinate_ = false;
                break;
            }
        }
    }
}

LatticeObservable LatticeObservable::from_symbol_values(const SftSpec& sft, const std::vector<Vec2i>& values) {
    if (values.size() != sft.size()) throw Error(ErrorCode::InvalidArgument, "one lattice value per symbol expected");
    std::vector<Vec2i> table(sft.size() * sft.size());
    for (std::size_t a = 0; a < sft.size(); ++a)
        for (std::size_t b = 0; b < sft.size(); ++b) table[a * sft.size() + b] = values[a];
    return LatticeObservable(sft, std::move(table));
}

LatticeObservable LatticeObservable::from_pairs(const SftSpec& sft, std::vector<Vec2i> pair_values) {
    return LatticeObservable(sft, std::move(pair_values));
}

Eigen::MatrixXd LatticeObservable::component(int axis) const {
    const auto n = static_cast<Eigen::Index>(n_);
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) {
            const Vec2i& v = values_[static_cast<std::size_t>(a) * n_ + static_cast<std::size_t>(b)];
            out(a, b) = axis == 0 ? v.x : v.y;
        }
    return out;
}

Vec2 mean_drift(const MarkovMeasure& m, const LatticeObservable& phi) {
    if (phi.size() != m.size()) throw Error(ErrorCode::InvalidArgument, "observable and measure alphabets differ");
    return {pair_expectation(m, phi.component(0)), pair_expectation(m, phi.component(1))};
}

CovarianceResult covariance_matrix(const MarkovMeasure& m, const LatticeObservable& phi) {
    const Vec2 drift = mean_drift(m, phi);
    if (std::abs(drift[0]) > 1e-12 || std::abs(drift[1]) > 1e-12)
        throw Error(ErrorCode::NonzeroDrift, "mean drift (" + std::to_string(drift[0]) + ", " +
                                                 std::to_string(drift[1]) + ") is not zero");
    const Eigen::MatrixXd z = fundamental_matrix(m);
    const Eigen::MatrixXd fx = phi.component(0);
    const Eigen::MatrixXd fy = phi.component(1);
    CovarianceResult out;
    const double xx = green_kubo(m, fx, fx, z);
    const double yy = green_kubo(m, fy, fy, z);
    const double xy = 0.5 * (green_kubo(m, fx, fy, z) + green_kubo(m, fy, fx, z));
    out.sigma = {{{xx, xy}, {xy, yy}}};

    // PSD clamp: eigenvalues in (-1e-10, 0) are set to 0.
    Eigen::Matrix2d s;
    s << xx, xy, xy, yy;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(s);
    Eigen::Vector2d ev = eig.eigenvalues();
    bool clamped = false;
    for (int i = 0; i < 2; ++i)
        if (ev(i) < 0.0 && ev(i) > -1e-10) {
            ev(i) = 0.0;
            clamped = true;
        }
    if (clamped) {
        const Eigen::Matrix2d r = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
        out.sigma = {{{r(0, 0), 0.5 * (r(0, 1) + r(1, 0))}, {0.5 * (r(0, 1) + r(1, 0)), r(1, 1)}}};
    }
    out.det = out.sigma[0][0] * out.sigma[1][1] - out.sigma[0][1] * out.sigma[1][0];
    const double scale = std::max({1.0, std::abs(out.sigma[0][0]), std::abs(out.sigma[1][1])});
    out.singular = out.det <= 1e-12 * scale * scale;
    return out;
}

double recurrence_beta(const CovarianceResult& cov) {
    if (cov.singular) throw Error(ErrorCode::SingularCovariance, "covariance matrix is not invertible");
    return 1.0 / (2.0 * std::numbers::pi * std::sqrt(cov.det));
}

Eigen::MatrixXcd twisted_matrix(const MarkovMeasure& m, const LatticeObservable& phi, const Vec2& u) {
    const auto n = static_cast<Eigen::Index>(m.size());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) {
            const double w = m.stochastic()(a, b);
            if (w == 0.0) continue;
            const Vec2i& v = phi(static_cast<Symbol>(a), static_cast<Symbol>(b));
            out(a, b) = std::polar(w, u[0] * v.x + u[1] * v.y);
        }
    return out;
}

std::vector<std::complex<double>> twisted_spectrum(const MarkovMeasure& m, const LatticeObservable& phi,
                                                   const Vec2& u) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(twisted_matrix(m, phi, u), false);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::EigenSolverFailure, "complex eigensolver failed");
    std::vector<std::complex<double>> ev(solver.eigenvalues().begin(), solver.eigenvalues().end());
    std::stable_sort(ev.begin(), ev.end(), [](auto x, auto y) { return std::abs(x) > std::abs(y); });
    return ev;
}

std::complex<double> twisted_eigenvalue(const MarkovMeasure& m, const LatticeObservable& phi, const Vec2& u) {
    if (u[0] == 0.0 && u[1] == 0.0) return {1.0, 0.0};
    return twisted_spectrum(m, phi, u).front();
}

HessianResult hessian_check(const MarkovMeasure& m, const LatticeObservable& phi, const CovarianceResult& cov,
                            double step) {
    // First-derivative weights for offsets -2..2, fourth order.
    constexpr std::array<double, 5> d1{1.0, -8.0, 0.0, 8.0, -1.0};
    constexpr std::array<double, 5> d2{-1.0, 16.0, -30.0, 16.0, -1.0};
    std::array<std::array<std::complex<double>, 5>, 5> f{};
    for (int i = -2; i <= 2; ++i)
        for (int j = -2; j <= 2; ++j) f[i + 2][j + 2] = twisted_eigenvalue(m, phi, {i * step, j * step});

    HessianResult out;
    out.step = step;
    std::complex<double> gx = 0, gy = 0, hxx = 0, hyy = 0, hxy = 0;
    for (int i = 0; i < 5; ++i) {
        gx += d1[i] * f[i][2];
        gy += d1[i] * f[2][i];
        hxx += d2[i] * f[i][2];
        hyy += d2[i] * f[2][i];
        for (int j = 0; j < 5; ++j) hxy += d1[i] * d1[j] * f[i][j];
    }
    out.grad = {gx / (12.0 * step), gy / (12.0 * step)};
    hxx /= 12.0 * step * step;
    hyy /= 12.0 * step * step;
    hxy /= 144.0 * step * step;
    out.hessian = {{{hxx.real(), hxy.real()}, {hxy.real(), hyy.real()}}};
    out.hessian_imag_max = std::max({std::abs(hxx.imag()), std::abs(hyy.imag()), std::abs(hxy.imag())});
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            out.deviation = std::max(out.deviation, std::abs(out.hessian[a][b] + cov.sigma[a][b]));
    return out;
}

namespace {
double wrap_coordinate(double x) {
    // Report -pi as +pi so coordinates lie in (-pi, pi].
    return x <= -std::numbers::pi + 1e-15 ? std::numbers::pi : x;
}
}  // namespace

ScanResult nonarithmeticity_scan(const MarkovMeasure& m, const LatticeObservable& phi, int grid_n,
                                 unsigned workers) {
    if (grid_n < 8) throw Error(ErrorCode::InvalidArgument, "scan grid needs grid_n >= 8");
    ScanResult out;
    out.grid_n = grid_n;
    const auto n = static_cast<std::size_t>(grid_n);
    out.points.resize(n * n);
    const double h = 2.0 * std::numbers::pi / grid_n;
    parallel_for(n * n, workers, [&](std::size_t idx) {
        const auto j = static_cast<int>(idx / n);
        const auto l = static_cast<int>(idx % n);
        ScanPoint& pt = out.points[idx];
        // Integer test for the origin avoids rounding in -pi + 2 pi j / n.
        const bool origin = 2 * j == grid_n && 2 * l == grid_n;
        pt.u = {origin ? 0.0 : -std::numbers::pi + h * j, origin ? 0.0 : -std::numbers::pi + h * l};
        if (origin) {
            pt.lambda = 1.0;
            pt.radius = 1.0;
            return;
        }
        const auto spectrum = twisted_spectrum(m, phi, pt.u);
        pt.lambda = spectrum.front();
        pt.radius = std::abs(spectrum.front());
    }, 16);

    double best = -1.0;
    for (std::size_t idx = 0; idx < out.points.size(); ++idx) {
        const auto& pt = out.points[idx];
        if (pt.u[0] == 0.0 && pt.u[1] == 0.0) continue;
        if (pt.radius > best) {
            best = pt.radius;
            out.argmax = {wrap_coordinate(pt.u[0]), wrap_coordinate(pt.u[1])};
        }
    }
    for (const auto& pt : out.points) {
        if (pt.u[0] == 0.0 && pt.u[1] == 0.0) continue;
        if (pt.radius >= best - 1e-12) out.argmax_set.push_back({wrap_coordinate(pt.u[0]), wrap_coordinate(pt.u[1])});
    }
    out.margin = 1.0 - best;
    return out;
}

double subleading_radius(const MarkovMeasure& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m.stochastic(), false);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::EigenSolverFailure, "eigensolver failed");
    std::vector<std::complex<double>> ev(solver.eigenvalues().begin(), solver.eigenvalues().end());
    const auto perron = std::min_element(ev.begin(), ev.end(), [](auto x, auto y) {
        return std::abs(x - 1.0) < std::abs(y - 1.0);
    });
    ev.erase(perron);
    double r = 0.0;
    for (auto z : ev) r = std::max(r, std::abs(z));
    return r;
}

double fit_quadratic_decay(const MarkovMeasure& m, const LatticeObservable& phi, const std::vector<Vec2>& us) {
    double c = std::numeric_limits<double>::infinity();
    for (const auto& u : us) {
        const double norm2 = u[0] * u[0] + u[1] * u[1];
        if (norm2 == 0.0) continue;
        const double modulus = std::abs(twisted_eigenvalue(m, phi, u));
        c = std::min(c, -std::log(modulus) / norm2);
    }
    return c;
}

SpectralReport spectral_report(const MarkovMeasure& m, const LatticeObservable& phi, int grid_n, double step,
                               unsigned workers) {
    SpectralReport r;
    r.covariance = covariance_matrix(m, phi);
    r.beta = r.covariance.singular ? 0.0 : recurrence_beta(r.covariance);
    r.hessian = hessian_check(m, phi, r.covariance, step);
    r.scan = nonarithmeticity_scan(m, phi, grid_n, workers);
    r.subleading_radius = subleading_radius(m);
    std::vector<Vec2> ring;
    for (double radius : {0.05, 0.1, 0.2, 0.3, 0.5})
        for (int a = 0; a < 8; ++a) {
            const double angle = a * std::numbers::pi / 4.0;
            ring.push_back({radius * std::cos(angle), radius * std::sin(angle)});
        }
    r.quadratic_decay = fit_quadratic_decay(m, phi, ring);
    return r;
}

}  // namespace recur2d
