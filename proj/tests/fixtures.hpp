#pragma once

#include "hyswitch/model.hpp"

namespace fixtures {

using namespace hyswitch;

// Three genotypes, two environments; genotype 1 never has the top fitness.
inline FitnessLandscape crossing_landscape() {
    Matrix w(3, 2);
    w << 1.0, 1.0,
         0.7, 1.1,
         1.1, 0.7;
    return FitnessLandscape(w);
}

inline Matrix symmetric_q(double rate = 1.0) {
    Matrix q(2, 2);
    q << -rate, rate,
         rate, -rate;
    return q;
}

inline ModelSpec crossing_model() { return {crossing_landscape(), ConstantGenerator{symmetric_q()}}; }

inline FitnessLandscape two_by_two_landscape() {
    Matrix w(2, 2);
    w << 1.0, 0.8,
         0.8, 1.0;
    return FitnessLandscape(w);
}

// Q(P) = [[-P2, P2], [P1, -P1]]: switching favours the dominant genotype.
inline ModelSpec reinforcing_model() {
    Matrix b1(2, 2), b2(2, 2);
    b1 << 0.0, 0.0,
          1.0, -1.0;
    b2 << -1.0, 1.0,
          0.0, 0.0;
    return {two_by_two_landscape(), AffineGenerator{{b1, b2}}};
}

// Q(P) = [[-P1, P1], [P2, -P2]]: switching works against the dominant genotype.
inline ModelSpec opposing_model() {
    Matrix b1(2, 2), b2(2, 2);
    b1 << -1.0, 1.0,
          0.0, 0.0;
    b2 << 0.0, 0.0,
          1.0, -1.0;
    return {two_by_two_landscape(), AffineGenerator{{b1, b2}}};
}

inline SimplexState state(std::initializer_list<double> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values)
        v[i++] = x;
    return SimplexState(v);
}

} // namespace fixtures
