#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "recur2d/markov.hpp"
#include "recur2d/spectral.hpp"
#include "recur2d/stats.hpp"

namespace recur2d {

enum class ReturnKind { Cylinder, Extension };

/// One return-time observation. A censored record stores the budget in `value`.
struct ReturnRecord {
    ReturnKind kind = ReturnKind::Cylinder;
    std::uint64_t value = 0;
    bool censored = false;
    int k = 0;
    double log_start_measure = 0.0;  // log nu(C_k(x))
    std::uint64_t seed = 0;

    double start_measure() const;
};

/// "kind,k,value,censored,log_start_measure,seed"
void write_records_csv(std::ostream& os, const std::vector<ReturnRecord>& records);

/// R_k for x ~ nu: first n >= 1 with the radius-k window of theta^n x equal to C_k(x).
ReturnRecord cylinder_return_time(const MarkovMeasure& m, int k, std::uint64_t seed, std::uint64_t budget);

/// R_k for x drawn from nu restricted to the two-sided window `target`.
ReturnRecord cylinder_return_time(const MarkovMeasure& m, const Window& target, std::uint64_t seed,
                                  std::uint64_t budget);

/// Radius-k window starting with a letter that does not recur, so the word
/// cannot overlap itself. Throws InvalidArgument if no such admissible word exists.
Window non_overlapping_window(const SftSpec& sft, int k);

struct ExtensionTrace {
    ReturnRecord record;
    /// First n >= 1 with S_n = 0 (0 if not seen within the budget).
    std::uint64_t first_zero = 0;
};

/// tau for eps = e^{-k}: first n >= 1 with S_n psi(x) = 0 and theta^n x in C_k(x).
/// The point is a LazyPoint of `seed`, so trajectories agree across k.
/// Throws NonzeroDrift or SingularCovariance.
ReturnRecord extension_return_time(const MarkovMeasure& m, const LatticeObservable& phi, int k,
                                   std::uint64_t seed, std::uint64_t budget);
ExtensionTrace extension_return_trace(const MarkovMeasure& m, const LatticeObservable& phi, int k,
                                      std::uint64_t seed, std::uint64_t budget);

/// Smallest two-sided radius-k cylinder measure, in log form.
double min_log_cylinder_measure(const MarkovMeasure& m, int k);

struct HirataResult {
    int k = 0;
    std::optional<Window> window;  // set in conditional mode
    std::vector<ReturnRecord> records;
    std::vector<double> scaled;    // nu(C_k) R_k (censored: nu(C_k) budget)
    std::vector<bool> censored;
    KsResult ks;
};

/// Conditional (window given) or unconditional Hirata experiment.
/// budget_factor: each trajectory runs at most ceil(budget_factor / nu(C_k)) steps.
HirataResult hirata_experiment(const MarkovMeasure& m, int k, const std::optional<Window>& window,
                               std::size_t n_samples, std::uint64_t seed, double budget_factor,
                               unsigned workers = 1);

struct TailRow {
    double t = 0.0;
    double empirical = 0.0;
    double stderr_ = 0.0;
    double limit = 0.0;  // beta t / (1 + beta t)
};

struct LowerTailResult {
    int k = 0;
    double beta = 0.0;
    std::vector<TailRow> rows;
    double censored_fraction = 0.0;
    std::uint64_t max_budget = 0;
    std::vector<ReturnRecord> records;
};

/// Empirical P(nu(C_k(x)) log tau <= t) with per-trajectory budget
/// floor(exp(t_max / nu(C_k(x)))). Throws BudgetExceeded when the largest
/// possible budget is above `step_ceiling`.
LowerTailResult theorem8_lower_tail(const MarkovMeasure& m, const LatticeObservable& phi, int k,
                                    const std::vector<double>& t_list, std::size_t n_traj, std::uint64_t seed,
                                    double step_ceiling, unsigned workers = 1);

struct QMatrixReport {
    Eigen::MatrixXd q;            // Q_ij; 0 where no admissible window joins i to j
    Eigen::MatrixXd closed_form;  // l_i r_j lambda
    double constancy_deviation = 0.0;
    double dimension = 0.0;
    std::size_t windows_checked = 0;
    Eigen::MatrixXd weights;      // p_i p_j

    /// sum_ij p_i p_j G_{beta Q_ij}(t).
    ReferenceCdf mixture(double beta) const;
};

/// Q_ij = nu(C_k(x)) e^{(2k+1) d / 2} over windows with endpoints (i, j).
/// Windows are enumerated when there are at most `max_windows` of them, else
/// that many are drawn from nu. Throws NotMaxEntropy.
QMatrixReport q_matrix(const MarkovMeasure& m, const std::vector<int>& k_range, std::size_t max_windows = 200000,
                       std::uint64_t seed = 0);

}  // namespace recur2d
