#pragma once

#include <optional>
#include <string>

#include "recur2d/markov.hpp"
#include "recur2d/spectral.hpp"

namespace recur2d {

/// A shift, its Gibbs measure and (optionally) the lattice step function.
struct System {
    std::string name;
    PairPotential potential;
    MarkovMeasure measure;
    std::optional<LatticeObservable> observable;
};

namespace systems {

/// Full shift on {E, N, W, S, R} with the uniform measure and unit steps;
/// R is the lazy (zero) step.
System lazy5();
/// Lazy walk with R stepping east; mean drift (1/5, 0).
System lazy5_biased();
/// Full shift on {E, N, W, S}, uniform, unit steps: the simple random walk.
System srw4();
/// Non-i.i.d. Markov walk on {E, N, W, S, R}: the potential favours
/// persistence and is invariant under E<->W, N<->S, so the drift vanishes.
System markov5();
/// Golden-mean shift [[1,1],[1,0]] with its measure of maximal entropy.
System golden_mean();
/// Full shift on n symbols, uniform measure, no observable.
System full_shift(int n);

/// Looks up one of the systems above by name ("lazy5", "srw4", ...).
System by_name(const std::string& name);

}  // namespace systems
}  // namespace recur2d
