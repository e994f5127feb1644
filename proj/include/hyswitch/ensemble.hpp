#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hyswitch/model.hpp"
#include "hyswitch/parallel.hpp"
#include "hyswitch/replicator.hpp"
#include "hyswitch/rng.hpp"
#include "hyswitch/simulator.hpp"

namespace hyswitch {

struct FixedStart {
    SimplexState state;
};
/// Uniform on the simplex (Dirichlet(1, ..., 1)); interior with probability 1.
struct UniformInterior {};
/// Uniform on {P : |P - e_vertex|_inf <= delta}.
struct NearVertex {
    Genotype vertex;
    double delta;
};
using StartRegion = std::variant<FixedStart, UniformInterior, NearVertex>;

struct InitialRegime {
    enum class Kind { Fixed, Uniform };
    Kind kind = Kind::Fixed;
    Regime regime = 0;

    static InitialRegime fixed(Regime k) { return {Kind::Fixed, k}; }
    static InitialRegime uniform() { return {Kind::Uniform, 0}; }
};

SimplexState sample_start(const StartRegion& region, std::size_t m, Rng& rng);

struct EnsembleParams {
    std::size_t runs = 500;
    double t_end = 200.0;
    double dt = kDefaultDt;
    double epsilon = kDefaultEpsilon;
    std::uint64_t seed = 0;
};

/// Escape is monitored on the sample grid: a run escapes once its sup-norm
/// distance from `target` exceeds r.
struct EscapeCriterion {
    Genotype target;
    double r;
};

struct RunRecord {
    std::size_t run = 0;
    std::uint64_t seed = 0;
    SimplexState start;
    Regime initial_regime = 0;
    OutcomeLabel outcome;
    std::size_t jumps = 0;
    double max_target_distance = 0.0; // only with an escape criterion
    bool escaped = false;
    std::string failure; // non-empty when the run failed and was demoted to Undecided
};

struct EscapeStats {
    Genotype target = 0;
    double r = 0.0;
    std::size_t escaped = 0;
    double frequency = 0.0;
    double std_error = 0.0;
    // A finite horizon only bounds the escape probability from below.
    bool lower_bound = true;
};

struct EnsembleReport {
    EnsembleParams params;
    std::optional<double> delta; // start radius for NearVertex starts
    std::size_t runs = 0;
    std::vector<std::size_t> fixation; // per vertex
    std::size_t polymorphic = 0;
    std::size_t undecided = 0;
    std::size_t failures = 0;
    std::optional<EscapeStats> escape;
    std::vector<RunRecord> records;

    double frequency(std::size_t count) const;
    double std_error(std::size_t count) const;
    double fixation_frequency(Genotype i) const { return frequency(fixation.at(i)); }
    std::size_t fixation_total() const;
};

/// Binomial standard error sqrt(f (1 - f) / N).
double binomial_std_error(double f, std::size_t n);

/// Runs `params.runs` independent hybrid simulations. Run i draws its start,
/// initial regime and switching from derive_seed(params.seed, i), so the
/// report is identical for Serial and Parallel execution and any thread
/// count. Failed runs count as Undecided with a failure note.
EnsembleReport run_ensemble(const ModelSpec& spec, const StartRegion& start, const InitialRegime& alpha0,
                            const EnsembleParams& params, const std::optional<EscapeCriterion>& escape,
                            Execution exec = Execution::Parallel);

EnsembleReport estimate_fixation(const ModelSpec& spec, const StartRegion& start, const InitialRegime& alpha0,
                                 const EnsembleParams& params, Execution exec = Execution::Parallel);

/// Starts uniform within sup-distance delta of `target`; requires
/// 0 < delta < r < 1.
EnsembleReport estimate_escape(const ModelSpec& spec, Genotype target, double delta, double r,
                               const InitialRegime& alpha0, const EnsembleParams& params,
                               Execution exec = Execution::Parallel);

struct CurvePoint {
    double delta;
    double frequency;
    double std_error;
};

/// Escape frequency for each delta (strictly decreasing, all < r). The
/// ensemble for deltas[j] uses master seed derive_seed(params.seed, j).
std::vector<CurvePoint> stability_curve(const ModelSpec& spec, Genotype target, const std::vector<double>& deltas,
                                        double r, const InitialRegime& alpha0, const EnsembleParams& params,
                                        Execution exec = Execution::Parallel);

} // namespace hyswitch
