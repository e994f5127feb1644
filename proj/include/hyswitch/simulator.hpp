#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hyswitch/model.hpp"

namespace hyswitch {

inline constexpr double kDefaultEpsilon = 1e-3;

struct TrajectorySample {
    double t;
    SimplexState state;
    Regime regime;
    bool jumped; // a regime change happened at this sample
};

struct JumpRecord {
    double t;
    Regime from;
    Regime to;
};

struct HybridTrajectory {
    std::vector<TrajectorySample> samples;
    std::vector<JumpRecord> jumps;
    std::uint64_t seed = 0;
    std::uint64_t fingerprint = 0;
};

/// Receives every sample in time order, starting with the initial one.
using SampleObserver = std::function<void(const TrajectorySample&)>;

struct SimulationSummary {
    SimplexState final_state;
    Regime final_regime = 0;
    std::size_t jumps = 0;
    std::size_t samples = 0;
};

/// Streams the hybrid path to `observer` without storing it.
///
/// Constant Q: holding times are drawn from `seed` up front of each sojourn
/// and the flow is integrated exactly up to each jump time (the step before a
/// jump is shortened). State-dependent Q: every dt step first advances the
/// flow in the current regime, then draws the next regime from
/// I + Q(P_new) dt. A regime with q_kk = 0 is absorbing.
///
/// Failures are rethrown as SimulationError carrying the time of failure.
SimulationSummary simulate_observed(const ModelSpec& spec, const SimplexState& p0, Regime alpha0, double t_end,
                                    double dt, std::uint64_t seed, const SampleObserver& observer);

HybridTrajectory simulate(const ModelSpec& spec, const SimplexState& p0, Regime alpha0, double t_end, double dt,
                          std::uint64_t seed);

struct OutcomeLabel {
    enum class Kind { Fixation, Polymorphic, Undecided };
    Kind kind = Kind::Undecided;
    Genotype vertex = 0; // meaningful for Fixation
    SimplexState final_state;
    double distance = 0.0; // sup-norm distance to the nearest vertex
};

/// Fixation(i) when within epsilon of e_i, Polymorphic when farther than
/// 10 epsilon from every vertex, otherwise Undecided.
OutcomeLabel classify_state(const SimplexState& final_state, double epsilon = kDefaultEpsilon);
OutcomeLabel classify_outcome(const HybridTrajectory& traj, double epsilon = kDefaultEpsilon);

} // namespace hyswitch
