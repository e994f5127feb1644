#include "hyswitch/replicator.hpp"

#include <cmath>

#include "hyswitch/errors.hpp"

namespace hyswitch {

namespace {

void check_indices(std::size_t m, Regime k, const FitnessLandscape& landscape) {
    if (k >= landscape.environments())
        throw InvalidArgument("environment index out of range");
    if (m != landscape.genotypes())
        throw InvalidArgument("state dimension does not match the genotype count");
}

// Raw field on an unconstrained vector; the RK4 stages leave the simplex
// slightly and must not be re-validated.
Vector raw_field(const Vector& p, const Vector& w) {
    const double phi = w.dot(p);
    return (p.array() * (w.array() - phi)).matrix();
}

} // namespace

Vector vector_field(const SimplexState& p, Regime k, const FitnessLandscape& landscape) {
    check_indices(p.size(), k, landscape);
    return raw_field(p.values(), landscape.environment(k));
}

double average_fitness(const SimplexState& p, Regime k, const FitnessLandscape& landscape) {
    check_indices(p.size(), k, landscape);
    return landscape.environment(k).dot(p.values());
}

SimplexState rk4_step(const SimplexState& p, Regime k, const FitnessLandscape& landscape, double h) {
    check_indices(p.size(), k, landscape);
    const Vector w = landscape.environment(k);
    const Vector& x = p.values();
    const Vector k1 = raw_field(x, w);
    const Vector k2 = raw_field(x + 0.5 * h * k1, w);
    const Vector k3 = raw_field(x + 0.5 * h * k2, w);
    const Vector k4 = raw_field(x + h * k3, w);
    Vector next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!next.allFinite())
        throw NumericalFailure("non-finite state after integration step (dt too large?)");
    return SimplexState::project(std::move(next));
}

double next_step_time(double t, double dt, double limit) {
    const double next = t + dt;
    if (next >= limit || limit - next < 1e-9 * dt)
        return limit;
    return next;
}

FixedEnvTrajectory integrate_fixed_env(const SimplexState& p0, Regime k, const FitnessLandscape& landscape,
                                       double t_end, double dt) {
    check_indices(p0.size(), k, landscape);
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw InvalidArgument("dt must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end))
        throw InvalidArgument("t_end must be nonnegative");
    if (t_end > 0.0 && dt > t_end)
        throw InvalidArgument("dt exceeds t_end");

    FixedEnvTrajectory out;
    out.environment = k;
    out.times.push_back(0.0);
    out.states.push_back(p0);
    double t = 0.0;
    SimplexState p = p0;
    while (t < t_end) {
        const double next = next_step_time(t, dt, t_end);
        p = rk4_step(p, k, landscape, next - t);
        t = next;
        out.times.push_back(t);
        out.states.push_back(p);
    }
    return out;
}

std::optional<Genotype> FixedEnvEquilibria::stable_vertex() const {
    for (const auto& e : vertices)
        if (e.stable)
            return e.vertex;
    return std::nullopt;
}

FixedEnvEquilibria fixed_env_equilibria(Regime k, const FitnessLandscape& landscape) {
    if (k >= landscape.environments())
        throw InvalidArgument("environment index out of range");
    const std::size_t m = landscape.genotypes();
    double best = landscape(0, k);
    for (std::size_t i = 1; i < m; ++i)
        best = std::max(best, landscape(i, k));

    FixedEnvEquilibria out;
    for (std::size_t i = 0; i < m; ++i)
        if (landscape(i, k) == best)
            out.tied.push_back(i);
    if (out.tied.size() == 1)
        out.tied.clear();
    for (std::size_t i = 0; i < m; ++i)
        out.vertices.push_back({i, out.tied.empty() && landscape(i, k) == best});
    return out;
}

} // namespace hyswitch
