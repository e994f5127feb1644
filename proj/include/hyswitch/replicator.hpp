#pragma once

#include <optional>
#include <vector>

#include "hyswitch/model.hpp"

namespace hyswitch {

inline constexpr double kDefaultDt = 0.01;

/// F_i(P, k) = P_i (w_i^k - phi^k(P)).
Vector vector_field(const SimplexState& p, Regime k, const FitnessLandscape& landscape);

/// phi^k(P) = sum_i w_i^k P_i.
double average_fitness(const SimplexState& p, Regime k, const FitnessLandscape& landscape);

/// One classical RK4 step of length h in environment k, followed by
/// clamp-then-rescale back onto the simplex. Throws NumericalFailure on a
/// non-finite result.
SimplexState rk4_step(const SimplexState& p, Regime k, const FitnessLandscape& landscape, double h);

/// Next grid time when stepping by dt from t towards `limit`. Snaps to
/// `limit` when the remainder is below 1e-9 dt so that no sliver step is
/// produced by accumulated rounding.
double next_step_time(double t, double dt, double limit);

struct FixedEnvTrajectory {
    std::vector<double> times;
    std::vector<SimplexState> states;
    Regime environment = 0;
};

FixedEnvTrajectory integrate_fixed_env(const SimplexState& p0, Regime k, const FitnessLandscape& landscape,
                                       double t_end, double dt = kDefaultDt);

struct Equilibrium {
    Genotype vertex;
    bool stable;
};

struct FixedEnvEquilibria {
    std::vector<Equilibrium> vertices;
    // Genotypes tied for the largest fitness; empty when the maximum is unique.
    std::vector<Genotype> tied;

    bool degenerate() const { return !tied.empty(); }
    std::optional<Genotype> stable_vertex() const;
};

/// Every vertex is an equilibrium; the stable one is argmax_i w_i^k.
FixedEnvEquilibria fixed_env_equilibria(Regime k, const FitnessLandscape& landscape);

} // namespace hyswitch
