#pragma once

#include <vector>

#include "hyswitch/model.hpp"
#include "hyswitch/rng.hpp"

namespace hyswitch {

/// Entries above this count as positive transition rates.
inline constexpr double kRateTol = 1e-12;

struct StationaryDistribution {
    Vector pi;
    // True iff the generator is irreducible.
    bool unique = false;
};

/// Irreducibility by reachability on the graph of off-diagonal rates > 1e-12.
bool is_irreducible(const Matrix& q);

/// Communicating classes that cannot be left, ordered by smallest member.
std::vector<std::vector<Regime>> closed_classes(const Matrix& q);

/// Solves pi Q = 0, pi . 1 = 1 as an equality-augmented least-squares
/// problem. Reducible generators get a distribution supported on the first
/// closed class and unique = false. Throws NumericalFailure when the
/// residual exceeds 1e-8.
StationaryDistribution stationary_distribution(const Matrix& q);

struct JumpSample {
    double holding_time;
    Regime next_regime;
};

/// Holding time ~ Exp(-q_kk); next regime l with probability q_kl / -q_kk.
/// Throws AbsorbingState when q_kk = 0.
JumpSample sample_jump(const Matrix& q, Regime k, Rng& rng);

/// Row k of I + Q(P) dt. Throws StepTooLarge if any entry leaves [0, 1].
Vector euler_transition_row(const GeneratorSpec& gen, const SimplexState& p, Regime k, double dt);

/// Draws the next regime from row k of I + Q(P) dt.
Regime step_state_dependent(const GeneratorSpec& gen, const SimplexState& p, Regime k, double dt, Rng& rng);

} // namespace hyswitch
