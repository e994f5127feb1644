#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "hyswitch/errors.hpp"
#include "hyswitch/replicator.hpp"
#include "oracles.hpp"

using namespace hyswitch;
using oracle::Fraction;

TEST_CASE("vector field at a vertex vanishes") {
    const auto l = fixtures::crossing_landscape();
    for (Genotype i = 0; i < 3; ++i)
        for (Regime k = 0; k < 2; ++k)
            CHECK(vector_field(SimplexState::vertex(3, i), k, l).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("crossing environment 1 at the barycentre") {
    // Exact rational evaluation of F_i = P_i (w_i - phi) with P = (1/3, 1/3, 1/3).
    const Fraction w[3] = {{1, 1}, {7, 10}, {11, 10}};
    const Fraction third{1, 3};
    const Fraction phi = third * w[0] + third * w[1] + third * w[2];
    CHECK(phi == Fraction(14, 15));
    const Fraction f[3] = {third * (w[0] - phi), third * (w[1] - phi), third * (w[2] - phi)};
    CHECK(f[0] == Fraction(1, 45));
    CHECK(f[1] == Fraction(-7, 90));
    CHECK(f[2] == Fraction(1, 18));

    const auto p = SimplexState::uniform(3);
    const auto l = fixtures::crossing_landscape();
    const Vector F = vector_field(p, 0, l);
    for (int i = 0; i < 3; ++i)
        CHECK(F[i] == doctest::Approx(f[i].value()).epsilon(1e-14));
    CHECK(average_fitness(p, 0, l) == doctest::Approx(phi.value()).epsilon(1e-14));
}

TEST_CASE("two genotypes at (1/2, 1/2)") {
    Matrix w(2, 1);
    w << 1.0, 0.8;
    const FitnessLandscape l(w);
    const auto p = fixtures::state({0.5, 0.5});
    const Vector F = vector_field(p, 0, l);
    CHECK(F[0] == doctest::Approx(0.05));
    CHECK(F[1] == doctest::Approx(-0.05));
    CHECK(average_fitness(p, 0, l) == doctest::Approx(0.9));
    CHECK(average_fitness(SimplexState::vertex(2, 1), 0, l) == 0.8);
}

TEST_CASE("index errors") {
    const auto l = fixtures::crossing_landscape();
    CHECK_THROWS_AS(vector_field(SimplexState::uniform(3), 2, l), InvalidArgument);
    CHECK_THROWS_AS(average_fitness(SimplexState::uniform(2), 0, l), InvalidArgument);
    CHECK_THROWS_AS(integrate_fixed_env(SimplexState::uniform(3), 0, l, 1.0, 2.0), InvalidArgument);
}

TEST_CASE("single genotype never moves") {
    Matrix w(1, 1);
    w << 2.0;
    const auto traj = integrate_fixed_env(SimplexState::vertex(1, 0), 0, FitnessLandscape(w), 5.0, 0.01);
    for (const auto& s : traj.states)
        CHECK(s[0] == 1.0);
    CHECK(traj.times.back() == 5.0);
}

TEST_CASE("fixed-environment integration matches the closed form") {
    const auto l = fixtures::crossing_landscape();
    const auto p0 = SimplexState::uniform(3);
    for (Regime k = 0; k < 2; ++k) {
        const auto traj = integrate_fixed_env(p0, k, l, 20.0, 0.01);
        const Vector exact = oracle::replicator_exact(p0.values(), l.environment(k), 20.0);
        CHECK((traj.states.back().values() - exact).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("crossing environments converge to their argmax vertex") {
    const auto l = fixtures::crossing_landscape();
    const auto env1 = integrate_fixed_env(SimplexState::uniform(3), 0, l, 200.0, 0.01);
    CHECK(env1.states.back().distance_to_vertex(2) < 1e-6);
    const auto env2 = integrate_fixed_env(SimplexState::uniform(3), 1, l, 200.0, 0.01);
    CHECK(env2.states.back().distance_to_vertex(1) < 1e-6);
    // the closed form agrees on the final state
    CHECK((env1.states.back().values() - oracle::replicator_exact(Vector::Constant(3, 1.0 / 3), l.environment(0), 200.0))
              .cwiseAbs()
              .maxCoeff() < 1e-9);
}

TEST_CASE("halving dt barely changes the crossing runs") {
    const auto l = fixtures::crossing_landscape();
    for (Regime k = 0; k < 2; ++k) {
        const auto a = integrate_fixed_env(SimplexState::uniform(3), k, l, 200.0, 0.01);
        const auto b = integrate_fixed_env(SimplexState::uniform(3), k, l, 200.0, 0.005);
        CHECK((a.states.back().values() - b.states.back().values()).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("property: field sums to zero, subsimplices are invariant, fitness climbs") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> fit(0.2, 2.0);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t m = 2 + trial % 4;
        Matrix w(static_cast<Eigen::Index>(m), 1);
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            w(i, 0) = fit(rng);
        const FitnessLandscape l(w);
        Vector p = oracle::random_interior(m, rng);
        p[0] = 0.0;
        p /= p.sum();
        const SimplexState p0(p);
        CHECK(std::abs(vector_field(p0, 0, l).sum()) < 1e-12);

        const auto traj = integrate_fixed_env(p0, 0, l, 10.0, 0.01);
        for (std::size_t s = 0; s < traj.states.size(); ++s) {
            CHECK(traj.states[s][0] == 0.0);
            if (s > 0)
                CHECK(average_fitness(traj.states[s], 0, l) >= average_fitness(traj.states[s - 1], 0, l) - 1e-10);
        }
    }
}

TEST_CASE("equilibria in a fixed environment") {
    const auto l = fixtures::crossing_landscape();
    CHECK(fixed_env_equilibria(0, l).stable_vertex() == Genotype{2});
    CHECK(fixed_env_equilibria(1, l).stable_vertex() == Genotype{1});
    Matrix w(2, 1);
    w << 1.0, 0.8;
    const auto e = fixed_env_equilibria(0, FitnessLandscape(w));
    CHECK(e.vertices.size() == 2);
    CHECK(e.stable_vertex() == Genotype{0});
    CHECK_FALSE(e.degenerate());

    Matrix tie(3, 1);
    tie << 1.0, 1.0, 0.5;
    const auto d = fixed_env_equilibria(0, FitnessLandscape(tie));
    CHECK(d.degenerate());
    CHECK(d.tied == std::vector<Genotype>{0, 1});
    CHECK_FALSE(d.stable_vertex().has_value());
}

TEST_CASE("step grid snaps to the limit") {
    CHECK(next_step_time(0.0, 0.01, 1.0) == 0.01);
    CHECK(next_step_time(0.99, 0.01, 1.0) == 1.0);
    CHECK(next_step_time(0.995, 0.01, 1.0) == 1.0);
    CHECK(next_step_time(1.0 - 0.01 - 1e-13, 0.01, 1.0) == 1.0);
}
