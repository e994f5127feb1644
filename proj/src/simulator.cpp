#include "hyswitch/simulator.hpp"

#include <cmath>
#include <limits>

#include "hyswitch/errors.hpp"
#include "hyswitch/regime.hpp"
#include "hyswitch/replicator.hpp"
#include "hyswitch/rng.hpp"

namespace hyswitch {

namespace {

void check_arguments(const ModelSpec& spec, const SimplexState& p0, Regime alpha0, double t_end, double dt) {
    const auto report = validate_model(spec);
    if (!report.ok())
        throw InvalidArgument("invalid model: " + report.errors.front());
    if (p0.size() != spec.genotypes())
        throw InvalidArgument("initial state dimension does not match the genotype count");
    if (alpha0 >= spec.environments())
        throw InvalidArgument("initial regime out of range");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw InvalidArgument("dt must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end))
        throw InvalidArgument("t_end must be nonnegative");
}

struct Sojourn {
    double until = std::numeric_limits<double>::infinity();
    Regime next = 0;
};

Sojourn draw_sojourn(const Matrix& q, Regime k, double t, Rng& rng) {
    const auto kk = static_cast<Eigen::Index>(k);
    if (!(q(kk, kk) < 0.0))
        return {};
    const auto jump = sample_jump(q, k, rng);
    return {t + jump.holding_time, jump.next_regime};
}

} // namespace

SimulationSummary simulate_observed(const ModelSpec& spec, const SimplexState& p0, Regime alpha0, double t_end,
                                    double dt, std::uint64_t seed, const SampleObserver& observer) {
    check_arguments(spec, p0, alpha0, t_end, dt);
    const auto& landscape = spec.landscape;
    Rng rng(seed);

    SimulationSummary out{p0, alpha0, 0, 1};
    double t = 0.0;
    SimplexState p = p0;
    Regime k = alpha0;
    auto emit = [&](bool jumped) {
        if (observer)
            observer(TrajectorySample{t, p, k, jumped});
    };
    emit(false);

    try {
        if (spec.generator.is_constant()) {
            const Matrix& q = spec.generator.constant();
            Sojourn sojourn = draw_sojourn(q, k, t, rng);
            while (t < t_end) {
                const bool jump_in_range = sojourn.until <= t_end;
                const double limit = jump_in_range ? sojourn.until : t_end;
                const double next = next_step_time(t, dt, limit);
                p = rk4_step(p, k, landscape, next - t);
                t = next;
                const bool jumped = jump_in_range && next == limit;
                if (jumped) {
                    k = sojourn.next;
                    ++out.jumps;
                    sojourn = draw_sojourn(q, k, t, rng);
                }
                ++out.samples;
                emit(jumped);
            }
        } else {
            while (t < t_end) {
                const double next = next_step_time(t, dt, t_end);
                const double h = next - t;
                p = rk4_step(p, k, landscape, h);
                const Regime from = k;
                k = step_state_dependent(spec.generator, p, k, h, rng);
                t = next;
                const bool jumped = k != from;
                if (jumped)
                    ++out.jumps;
                ++out.samples;
                emit(jumped);
            }
        }
    } catch (const SimulationError&) {
        throw;
    } catch (const Error& e) {
        throw SimulationError(t, e.what());
    }

    out.final_state = p;
    out.final_regime = k;
    return out;
}

HybridTrajectory simulate(const ModelSpec& spec, const SimplexState& p0, Regime alpha0, double t_end, double dt,
                          std::uint64_t seed) {
    HybridTrajectory traj;
    traj.seed = seed;
    traj.fingerprint = model_fingerprint(spec);
    Regime previous = alpha0;
    simulate_observed(spec, p0, alpha0, t_end, dt, seed, [&](const TrajectorySample& s) {
        if (s.jumped)
            traj.jumps.push_back({s.t, previous, s.regime});
        previous = s.regime;
        traj.samples.push_back(s);
    });
    return traj;
}

OutcomeLabel classify_state(const SimplexState& final_state, double epsilon) {
    if (!(epsilon > 0.0))
        throw InvalidArgument("epsilon must be positive");
    OutcomeLabel out;
    out.final_state = final_state;
    out.vertex = final_state.nearest_vertex();
    out.distance = final_state.distance_to_vertex(out.vertex);
    if (out.distance < epsilon)
        out.kind = OutcomeLabel::Kind::Fixation;
    else if (out.distance > 10.0 * epsilon)
        out.kind = OutcomeLabel::Kind::Polymorphic;
    else
        out.kind = OutcomeLabel::Kind::Undecided;
    return out;
}

OutcomeLabel classify_outcome(const HybridTrajectory& traj, double epsilon) {
    if (traj.samples.empty())
        throw InvalidArgument("empty trajectory");
    return classify_state(traj.samples.back().state, epsilon);
}

} // namespace hyswitch
