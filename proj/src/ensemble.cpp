#include "hyswitch/ensemble.hpp"

#include <cmath>

#include "hyswitch/errors.hpp"

namespace hyswitch {

namespace {

Vector dirichlet_ones(std::size_t m, Rng& rng) {
    Vector p(static_cast<Eigen::Index>(m));
    for (Eigen::Index i = 0; i < p.size(); ++i)
        p[i] = rng.exponential(1.0);
    return p / p.sum();
}

} // namespace

SimplexState sample_start(const StartRegion& region, std::size_t m, Rng& rng) {
    if (const auto* f = std::get_if<FixedStart>(&region)) {
        if (f->state.size() != m)
            throw InvalidArgument("start state dimension does not match the genotype count");
        return f->state;
    }
    if (std::holds_alternative<UniformInterior>(region))
        return SimplexState::project(dirichlet_ones(m, rng));
    const auto& nv = std::get<NearVertex>(region);
    if (nv.vertex >= m)
        throw InvalidArgument("start vertex out of range");
    if (!(nv.delta > 0.0 && nv.delta < 1.0))
        throw InvalidArgument("start radius must lie in (0, 1)");
    // The affine map D -> (1 - delta) e_v + delta D sends the simplex onto the
    // delta-ball around e_v, so uniform D gives a uniform start there.
    Vector p = nv.delta * dirichlet_ones(m, rng);
    p[static_cast<Eigen::Index>(nv.vertex)] += 1.0 - nv.delta;
    return SimplexState::project(std::move(p));
}

double binomial_std_error(double f, std::size_t n) {
    return n == 0 ? 0.0 : std::sqrt(f * (1.0 - f) / static_cast<double>(n));
}

double EnsembleReport::frequency(std::size_t count) const {
    return runs == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(runs);
}

double EnsembleReport::std_error(std::size_t count) const { return binomial_std_error(frequency(count), runs); }

std::size_t EnsembleReport::fixation_total() const {
    std::size_t total = 0;
    for (auto c : fixation)
        total += c;
    return total;
}

namespace {

RunRecord run_one(const ModelSpec& spec, const StartRegion& start, const InitialRegime& alpha0,
                  const EnsembleParams& params, const std::optional<EscapeCriterion>& escape, std::size_t index) {
    RunRecord rec;
    rec.run = index;
    rec.seed = derive_seed(params.seed, index);
    const std::size_t m = spec.genotypes();
    Rng rng(rec.seed);
    try {
        rec.start = sample_start(start, m, rng);
        rec.initial_regime = alpha0.kind == InitialRegime::Kind::Uniform
                                 ? static_cast<Regime>(rng.uniform() * static_cast<double>(spec.environments()))
                                 : alpha0.regime;
    } catch (const Error& e) {
        rec.start = SimplexState::uniform(m);
        rec.outcome = classify_state(rec.start, params.epsilon);
        rec.outcome.kind = OutcomeLabel::Kind::Undecided;
        rec.failure = e.what();
        return rec;
    }

    SimplexState last = rec.start;
    try {
        const auto summary = simulate_observed(
            spec, rec.start, rec.initial_regime, params.t_end, params.dt, derive_seed(rec.seed, 0),
            [&](const TrajectorySample& s) {
                last = s.state;
                if (escape)
                    rec.max_target_distance = std::max(rec.max_target_distance, s.state.distance_to_vertex(escape->target));
            });
        rec.jumps = summary.jumps;
        rec.outcome = classify_state(summary.final_state, params.epsilon);
    } catch (const Error& e) {
        rec.outcome = classify_state(last, params.epsilon);
        rec.outcome.kind = OutcomeLabel::Kind::Undecided;
        rec.failure = e.what();
    }
    if (escape)
        rec.escaped = rec.max_target_distance > escape->r;
    return rec;
}

} // namespace

EnsembleReport run_ensemble(const ModelSpec& spec, const StartRegion& start, const InitialRegime& alpha0,
                            const EnsembleParams& params, const std::optional<EscapeCriterion>& escape,
                            Execution exec) {
    if (params.runs < 1)
        throw InvalidArgument("ensemble needs at least one run");
    const auto report = validate_model(spec);
    if (!report.ok())
        throw InvalidArgument("invalid model: " + report.errors.front());
    if (alpha0.kind == InitialRegime::Kind::Fixed && alpha0.regime >= spec.environments())
        throw InvalidArgument("initial regime out of range");
    if (escape && escape->target >= spec.genotypes())
        throw InvalidArgument("escape target out of range");

    EnsembleReport out;
    out.params = params;
    out.runs = params.runs;
    out.records.resize(params.runs);
    if (const auto* nv = std::get_if<NearVertex>(&start))
        out.delta = nv->delta;

    if (exec == Execution::Parallel) {
        const auto total = static_cast<long long>(params.runs);
#pragma omp parallel for schedule(dynamic, 4) num_threads(thread_count())
        for (long long i = 0; i < total; ++i)
            out.records[static_cast<std::size_t>(i)] =
                run_one(spec, start, alpha0, params, escape, static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < params.runs; ++i)
            out.records[i] = run_one(spec, start, alpha0, params, escape, i);
    }

    // Integer counts: the reduction is independent of run order.
    out.fixation.assign(spec.genotypes(), 0);
    std::size_t escaped = 0;
    for (const auto& rec : out.records) {
        switch (rec.outcome.kind) {
        case OutcomeLabel::Kind::Fixation:
            ++out.fixation[rec.outcome.vertex];
            break;
        case OutcomeLabel::Kind::Polymorphic:
            ++out.polymorphic;
            break;
        case OutcomeLabel::Kind::Undecided:
            ++out.undecided;
            break;
        }
        if (!rec.failure.empty())
            ++out.failures;
        if (rec.escaped)
            ++escaped;
    }
    if (escape) {
        EscapeStats stats;
        stats.target = escape->target;
        stats.r = escape->r;
        stats.escaped = escaped;
        stats.frequency = out.frequency(escaped);
        stats.std_error = out.std_error(escaped);
        out.escape = stats;
    }
    return out;
}

EnsembleReport estimate_fixation(const ModelSpec& spec, const StartRegion& start, const InitialRegime& alpha0,
                                 const EnsembleParams& params, Execution exec) {
    return run_ensemble(spec, start, alpha0, params, std::nullopt, exec);
}

EnsembleReport estimate_escape(const ModelSpec& spec, Genotype target, double delta, double r,
                               const InitialRegime& alpha0, const EnsembleParams& params, Execution exec) {
    if (!(delta > 0.0 && delta < r && r < 1.0))
        throw InvalidArgument("escape estimation needs 0 < delta < r < 1");
    return run_ensemble(spec, NearVertex{target, delta}, alpha0, params, EscapeCriterion{target, r}, exec);
}

std::vector<CurvePoint> stability_curve(const ModelSpec& spec, Genotype target, const std::vector<double>& deltas,
                                        double r, const InitialRegime& alpha0, const EnsembleParams& params,
                                        Execution exec) {
    if (deltas.empty())
        throw InvalidArgument("stability curve needs at least one delta");
    for (std::size_t j = 0; j < deltas.size(); ++j) {
        if (!(deltas[j] > 0.0 && deltas[j] < r))
            throw InvalidArgument("every delta must lie in (0, r)");
        if (j > 0 && !(deltas[j] < deltas[j - 1]))
            throw InvalidArgument("deltas must be strictly decreasing");
    }
    std::vector<CurvePoint> out;
    for (std::size_t j = 0; j < deltas.size(); ++j) {
        EnsembleParams p = params;
        p.seed = derive_seed(params.seed, j);
        const auto rep = estimate_escape(spec, target, deltas[j], r, alpha0, p, exec);
        out.push_back({deltas[j], rep.escape->frequency, rep.escape->std_error});
    }
    return out;
}

} // namespace hyswitch
