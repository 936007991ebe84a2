#include "recur2d/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "recur2d/error.hpp"
#include "recur2d/parallel.hpp"

namespace recur2d {

PairPotential PairPotential::zero(const SftSpec& sft) {
    return {Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sft.size()), static_cast<Eigen::Index>(sft.size()))};
}

PairPotential PairPotential::from_function(const SftSpec& sft, const std::function<double(Symbol, Symbol)>& f) {
    PairPotential h = zero(sft);
    for (std::size_t a = 0; a < sft.size(); ++a)
        for (std::size_t b = 0; b < sft.size(); ++b)
            if (sft.admissible(static_cast<Symbol>(a), static_cast<Symbol>(b)))
                h.values(a, b) = f(static_cast<Symbol>(a), static_cast<Symbol>(b));
    return h;
}

PairPotential PairPotential::from_symbol_values(const SftSpec& sft, const std::vector<double>& f) {
    if (f.size() != sft.size()) throw Error(ErrorCode::InvalidArgument, "one value per symbol expected");
    return from_function(sft, [&](Symbol a, Symbol) { return f[a]; });
}

RecodedPotential recode_potential(const SftSpec& sft, int word_length,
                                  const std::function<double(std::span<const Symbol>)>& h) {
    if (word_length < 2) throw Error(ErrorCode::InvalidArgument, "recoding needs words of length >= 2");
    std::vector<std::vector<Symbol>> blocks;
    SftSpec block_sft = higher_block(sft, word_length - 1, &blocks);
    PairPotential pot = PairPotential::from_function(block_sft, [&](Symbol u, Symbol v) {
        std::vector<Symbol> word = blocks[u];
        word.push_back(blocks[v].back());
        return h(word);
    });
    return {std::move(block_sft), std::move(pot)};
}

MarkovMeasure::MarkovMeasure(SftSpec sft, Eigen::MatrixXd stochastic, Eigen::VectorXd stationary,
                             double perron_value)
    : sft_(std::move(sft)), pi_(std::move(stochastic)), p_(std::move(stationary)), lambda_(perron_value) {
    const auto n = static_cast<Eigen::Index>(sft_.size());
    if (pi_.rows() != n || pi_.cols() != n || p_.size() != n)
        throw Error(ErrorCode::InvalidArgument, "measure dimensions disagree with the alphabet");
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            const bool allowed = sft_.admissible(static_cast<Symbol>(a), static_cast<Symbol>(b));
            if (allowed != (pi_(a, b) > 0.0) || pi_(a, b) < 0.0)
                throw Error(ErrorCode::InvalidArgument, "stochastic matrix support differs from the SFT");
        }
        if (std::abs(pi_.row(a).sum() - 1.0) > 1e-12)
            throw Error(ErrorCode::InvalidArgument, "stochastic matrix row does not sum to 1");
    }
    if (std::abs(p_.sum() - 1.0) > 1e-12 || (p_.array() <= 0.0).any())
        throw Error(ErrorCode::InvalidArgument, "stationary vector must be a positive probability vector");
    const Eigen::VectorXd residual = pi_.transpose() * p_ - p_;
    if (residual.cwiseAbs().maxCoeff() > 1e-12)
        throw Error(ErrorCode::InvalidArgument, "stationary vector is not invariant");

    entropy_ = 0.0;
    reversed_ = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) {
            if (pi_(a, b) <= 0.0) continue;
            entropy_ -= p_(a) * pi_(a, b) * std::log(pi_(a, b));
            reversed_(b, a) = p_(a) * pi_(a, b) / p_(b);
        }

    stationary_alias_ = AliasTable(std::span<const double>(p_.data(), static_cast<std::size_t>(n)));
    forward_alias_.reserve(static_cast<std::size_t>(n));
    backward_alias_.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index a = 0; a < n; ++a) {
        const Eigen::VectorXd fwd = pi_.row(a).transpose();
        const Eigen::VectorXd bwd = reversed_.row(a).transpose();
        forward_alias_.emplace_back(std::span<const double>(fwd.data(), static_cast<std::size_t>(n)));
        backward_alias_.emplace_back(std::span<const double>(bwd.data(), static_cast<std::size_t>(n)));
    }
}

PerronData perron_eigen(const Eigen::MatrixXd& l, double rel_tol, int max_iterations) {
    const auto n = l.rows();
    auto iterate = [&](const Eigen::MatrixXd& mat) -> std::pair<double, Eigen::VectorXd> {
        Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
        double rayleigh = 0.0;
        for (int it = 0; it < max_iterations; ++it) {
            Eigen::VectorXd w = mat * v;
            const double next = v.dot(w) / v.dot(v);
            const double s = w.sum();
            if (!(s > 0.0) || !std::isfinite(s)) break;
            w /= s;
            const double change = (w - v).cwiseAbs().maxCoeff() / w.cwiseAbs().maxCoeff();
            const bool settled = it > 0 && std::abs(next - rayleigh) <= rel_tol * std::abs(next) && change <= rel_tol;
            v = std::move(w);
            rayleigh = next;
            if (settled) {
                if ((v.array() <= 0.0).any())
                    throw Error(ErrorCode::EigenSolverFailure, "Perron vector is not strictly positive");
                return {(mat * v).sum() / v.sum(), v};
            }
        }
        throw Error(ErrorCode::EigenSolverFailure,
                    "power iteration did not converge within " + std::to_string(max_iterations) + " iterations");
    };
    auto [value, right] = iterate(l);
    auto [value_left, left] = iterate(l.transpose());
    (void)value_left;
    left /= left.dot(right);
    return {value, std::move(right), std::move(left)};
}

MarkovMeasure gibbs_from_potential(const SftSpec& sft, const PairPotential& h) {
    const auto n = static_cast<Eigen::Index>(sft.size());
    if (h.values.rows() != n || h.values.cols() != n)
        throw Error(ErrorCode::InvalidArgument, "potential dimensions disagree with the alphabet");
    // Shifting by the largest entry keeps exp() in range and cancels in pi.
    double shift = -std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b)
            if (sft.admissible(static_cast<Symbol>(a), static_cast<Symbol>(b))) {
                if (!std::isfinite(h.values(a, b)))
                    throw Error(ErrorCode::InvalidArgument, "potential has a non-finite entry");
                shift = std::max(shift, h.values(a, b));
            }
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b)
            if (sft.admissible(static_cast<Symbol>(a), static_cast<Symbol>(b)))
                l(a, b) = std::exp(h.values(a, b) - shift);

    const PerronData perron = perron_eigen(l);
    Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b)
            pi(a, b) = l(a, b) * perron.right(b) / (perron.value * perron.right(a));
        pi.row(a) /= pi.row(a).sum();
    }
    Eigen::VectorXd p = perron.left.cwiseProduct(perron.right);
    p /= p.sum();
    return MarkovMeasure(sft, std::move(pi), std::move(p), perron.value * std::exp(shift));
}

MarkovMeasure max_entropy_measure(const SftSpec& sft) {
    return gibbs_from_potential(sft, PairPotential::zero(sft));
}

CylinderMeasure cylinder_measure(const MarkovMeasure& m, const Window& w) {
    w.require_admissible(m.sft());
    const auto& letters = w.letters();
    double log_value = std::log(m.stationary()(letters.front()));
    for (std::size_t i = 0; i + 1 < letters.size(); ++i) log_value += std::log(m.transition(letters[i], letters[i + 1]));
    return {log_value, std::exp(log_value)};
}

LazyPoint::LazyPoint(const MarkovMeasure& m, std::uint64_t seed)
    : measure_(&m), forward_rng_(derive_seed(seed, 0x1a2b, 0)), backward_rng_(derive_seed(seed, 0x1a2b, 1)) {
    forward_.push_back(static_cast<Symbol>(m.stationary_sampler().sample(forward_rng_)));
}

void LazyPoint::grow_forward(std::int64_t to) {
    while (forward_extent() < to)
        forward_.push_back(static_cast<Symbol>(measure_->forward_sampler(forward_.back()).sample(forward_rng_)));
}

void LazyPoint::grow_backward(std::int64_t to) {
    while (backward_extent() < to) {
        const Symbol next_right = backward_.empty() ? forward_.front() : backward_.back();
        backward_.push_back(static_cast<Symbol>(measure_->backward_sampler(next_right).sample(backward_rng_)));
    }
}

Symbol LazyPoint::at(std::int64_t i) {
    if (i >= 0) {
        grow_forward(i);
        return forward_[static_cast<std::size_t>(i)];
    }
    grow_backward(-i);
    return backward_[static_cast<std::size_t>(-i - 1)];
}

Window LazyPoint::window(int k) {
    std::vector<Symbol> letters;
    letters.reserve(static_cast<std::size_t>(2 * k + 1));
    for (int i = -k; i <= k; ++i) letters.push_back(at(i));
    return Window::two_sided(std::move(letters));
}

std::vector<Symbol> sample_path(const MarkovMeasure& m, std::size_t length, Rng& rng) {
    std::vector<Symbol> path;
    if (length == 0) return path;
    path.reserve(length);
    path.push_back(static_cast<Symbol>(m.stationary_sampler().sample(rng)));
    while (path.size() < length) path.push_back(static_cast<Symbol>(m.forward_sampler(path.back()).sample(rng)));
    return path;
}

double pair_expectation(const MarkovMeasure& m, const Eigen::MatrixXd& f) {
    double e = 0.0;
    for (Eigen::Index a = 0; a < f.rows(); ++a)
        for (Eigen::Index b = 0; b < f.cols(); ++b) e += m.stationary()(a) * m.stochastic()(a, b) * f(a, b);
    return e;
}

Eigen::MatrixXd fundamental_matrix(const MarkovMeasure& m) {
    const auto n = static_cast<Eigen::Index>(m.size());
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - m.stochastic() +
                              Eigen::VectorXd::Ones(n) * m.stationary().transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) throw Error(ErrorCode::SingularFundamentalMatrix, "I - pi + 1p is singular");
    return lu.inverse();
}

double green_kubo(const MarkovMeasure& m, const Eigen::MatrixXd& f, const Eigen::MatrixXd& g,
                  const Eigen::MatrixXd& z) {
    const auto n = static_cast<Eigen::Index>(m.size());
    const auto& pi = m.stochastic();
    const auto& p = m.stationary();
    const Eigen::MatrixXd fc = (f.array() - pair_expectation(m, f)).matrix();
    const Eigen::MatrixXd gc = (g.array() - pair_expectation(m, g)).matrix();
    // Conditional means of the next increment given the current symbol.
    const Eigen::VectorXd cond_f = pi.cwiseProduct(fc).rowwise().sum();
    const Eigen::VectorXd cond_g = pi.cwiseProduct(gc).rowwise().sum();
    const Eigen::VectorXd future_f = z * cond_f;
    const Eigen::VectorXd future_g = z * cond_g;
    double sum = 0.0;
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) {
            const double w = p(a) * pi(a, b);
            if (w == 0.0) continue;
            sum += w * (fc(a, b) * gc(a, b) + fc(a, b) * future_g(b) + gc(a, b) * future_f(b));
        }
    return sum;
}

double asymptotic_variance_scalar(const MarkovMeasure& m, const PairPotential& f) {
    const double v = green_kubo(m, f.values, f.values, fundamental_matrix(m));
    return (v < 0.0 && v > -1e-10) ? 0.0 : v;
}

PairPotential log_transition_potential(const MarkovMeasure& m) {
    return PairPotential::from_function(m.sft(), [&](Symbol a, Symbol b) { return std::log(m.transition(a, b)); });
}

CltSamples clt_fluctuation_samples(const MarkovMeasure& m, int k, std::size_t n_samples, std::uint64_t seed,
                                   unsigned workers) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "clt samples need k >= 1");
    CltSamples out;
    out.k = k;
    out.raw.resize(n_samples);
    out.corrected.resize(n_samples);
    double mean_log_p = 0.0;
    for (Eigen::Index a = 0; a < m.stationary().size(); ++a)
        mean_log_p += m.stationary()(a) * std::log(m.stationary()(a));
    out.exact_mean_log_measure = mean_log_p - 2.0 * k * m.entropy();

    const double root_k = std::sqrt(static_cast<double>(k));
    const double kd = k * m.dimension();
    const std::size_t length = static_cast<std::size_t>(2 * k + 1);
    parallel_for(n_samples, workers, [&](std::size_t i) {
        Rng rng(derive_seed(seed, 0xc17, i));
        const auto path = sample_path(m, length, rng);
        double log_measure = std::log(m.stationary()(path.front()));
        for (std::size_t j = 0; j + 1 < path.size(); ++j) log_measure += std::log(m.transition(path[j], path[j + 1]));
        out.raw[i] = (log_measure + kd) / root_k;
        out.corrected[i] = (log_measure - out.exact_mean_log_measure) / root_k;
    });
    return out;
}

}  // namespace recur2d
