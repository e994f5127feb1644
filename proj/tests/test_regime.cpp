#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "hyswitch/errors.hpp"
#include "hyswitch/regime.hpp"
#include "oracles.hpp"

using namespace hyswitch;

TEST_CASE("two-state closed form") {
    const double a = 0.7, b = 2.5;
    Matrix q(2, 2);
    q << -a, a, b, -b;
    const auto sd = stationary_distribution(q);
    CHECK(sd.unique);
    CHECK(sd.pi[0] == doctest::Approx(b / (a + b)).epsilon(1e-13));
    CHECK(sd.pi[1] == doctest::Approx(a / (a + b)).epsilon(1e-13));
}

TEST_CASE("reducible generators from the state-dependent examples") {
    const auto q1 = fixtures::reinforcing_model().generator;
    const auto q2 = fixtures::opposing_model().generator;
    const auto e1 = SimplexState::vertex(2, 0);
    const auto e2 = SimplexState::vertex(2, 1);

    const auto a = stationary_distribution(q1.at(e1));
    CHECK_FALSE(a.unique);
    CHECK(a.pi[0] == 1.0);
    CHECK(a.pi[1] == 0.0);
    const auto b = stationary_distribution(q1.at(e2));
    CHECK(b.pi[1] == 1.0);

    const auto c = stationary_distribution(q2.at(e1));
    CHECK_FALSE(c.unique);
    CHECK(c.pi[1] == 1.0);
    CHECK(stationary_distribution(q2.at(e2)).pi[0] == 1.0);
}

TEST_CASE("two absorbing states pick the first closed class") {
    const auto sd = stationary_distribution(Matrix::Zero(3, 3));
    CHECK_FALSE(sd.unique);
    CHECK(sd.pi[0] == 1.0);
    CHECK(closed_classes(Matrix::Zero(3, 3)).size() == 3);
}

TEST_CASE("single regime") {
    const auto sd = stationary_distribution(Matrix::Zero(1, 1));
    CHECK(sd.unique);
    CHECK(sd.pi[0] == 1.0);
}

TEST_CASE("non-generators are rejected") {
    Matrix q(2, 2);
    q << -1, 2, 1, -1;
    CHECK_THROWS_AS(stationary_distribution(q), InvalidArgument);
}

TEST_CASE("property: residual bound and positivity on random irreducible generators") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + trial % 5;
        // sparse-ish: a cycle guarantees irreducibility, extra rates are random
        Matrix q = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        std::uniform_real_distribution<double> u(0.0, 2.0);
        for (Eigen::Index k = 0; k < q.rows(); ++k) {
            q(k, (k + 1) % q.rows()) = 0.1 + u(rng);
            for (Eigen::Index l = 0; l < q.cols(); ++l)
                if (l != k && u(rng) < 0.6)
                    q(k, l) += u(rng);
            q(k, k) = 0.0;
            q(k, k) = -q.row(k).sum();
        }
        REQUIRE(is_irreducible(q));
        const auto sd = stationary_distribution(q);
        CHECK(sd.unique);
        CHECK((sd.pi.transpose() * q).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(std::abs(sd.pi.sum() - 1.0) <= 1e-12);
        CHECK(sd.pi.minCoeff() > 0.0);
        const Vector limit = oracle::expm(q * 1000.0).row(0).transpose();
        CHECK((limit - sd.pi).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("exponential holding times") {
    Matrix q(2, 2);
    q << -1, 1, 2, -2;
    Rng rng(2024);
    const int draws = 100000;
    double sum1 = 0, sum2 = 0;
    for (int i = 0; i < draws; ++i) {
        const auto a = sample_jump(q, 0, rng);
        CHECK(a.next_regime == 1);
        CHECK(a.holding_time > 0.0);
        sum1 += a.holding_time;
        sum2 += sample_jump(q, 1, rng).holding_time;
    }
    CHECK(std::abs(sum1 / draws - 1.0) < 0.01);
    CHECK(std::abs(sum2 / draws - 0.5) < 0.5 * 0.01);
}

TEST_CASE("embedded chain probabilities") {
    Matrix q(3, 3);
    q << -3, 1, 2, 1, -1, 0, 0, 1, -1;
    Rng rng(5);
    int counts[3] = {0, 0, 0};
    const int draws = 100000;
    for (int i = 0; i < draws; ++i)
        ++counts[sample_jump(q, 0, rng).next_regime];
    CHECK(counts[0] == 0);
    CHECK(std::abs(counts[1] / double(draws) - 1.0 / 3) < 0.02);
    CHECK(std::abs(counts[2] / double(draws) - 2.0 / 3) < 0.02);
}

TEST_CASE("absorbing regime") {
    Matrix q(2, 2);
    q << 0, 0, 1, -1;
    Rng rng(1);
    CHECK_THROWS_AS(sample_jump(q, 0, rng), AbsorbingState);
}

TEST_CASE("identical seeds give identical streams") {
    const auto q = fixtures::symmetric_q(1.3);
    Rng a(77), b(77);
    for (int i = 0; i < 1000; ++i) {
        const auto x = sample_jump(q, i % 2, a);
        const auto y = sample_jump(q, i % 2, b);
        CHECK(x.holding_time == y.holding_time);
        CHECK(x.next_regime == y.next_regime);
    }
}

TEST_CASE("state-dependent Euler step") {
    const auto q1 = fixtures::reinforcing_model().generator;
    Rng rng(3);
    SUBCASE("zero row never switches") {
        for (int i = 0; i < 1000; ++i)
            CHECK(step_state_dependent(q1, SimplexState::vertex(2, 0), 0, 0.01, rng) == 0);
    }
    SUBCASE("switch probability at the barycentre") {
        const Vector row = euler_transition_row(q1, fixtures::state({0.5, 0.5}), 0, 0.01);
        CHECK(row[1] == doctest::Approx(0.005).epsilon(1e-12));
        CHECK(row.sum() == doctest::Approx(1.0).epsilon(1e-15));
        int switches = 0;
        const int draws = 200000;
        for (int i = 0; i < draws; ++i)
            switches += step_state_dependent(q1, fixtures::state({0.5, 0.5}), 0, 0.01, rng) == 1;
        // binomial sd ~ sqrt(0.005 / 2e5) = 1.6e-4
        CHECK(std::abs(switches / double(draws) - 0.005) < 6.5e-4);
    }
    SUBCASE("step too large") {
        Matrix q(2, 2);
        q << -200, 200, 1, -1;
        CHECK_THROWS_AS(step_state_dependent(GeneratorSpec(ConstantGenerator{q}), SimplexState::uniform(2), 0, 0.01, rng),
                        StepTooLarge);
    }
}

TEST_CASE("property: I + Q(P) dt rows sum to one") {
    std::mt19937_64 gen(8);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + trial % 4;
        AffineGenerator g;
        for (int i = 0; i < 3; ++i)
            g.basis.push_back(oracle::random_generator(n, 0.0, 2.0, gen));
        const GeneratorSpec spec(g);
        const SimplexState p(oracle::random_interior(3, gen));
        for (Regime k = 0; k < n; ++k)
            CHECK(std::abs(euler_transition_row(spec, p, k, 0.01).sum() - 1.0) < 1e-15);
    }
}
