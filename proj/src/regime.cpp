#include "hyswitch/regime.hpp"

#include <cmath>

#include "hyswitch/errors.hpp"

namespace hyswitch {

namespace {

using Reach = std::vector<std::vector<bool>>;

Reach reachability(const Matrix& q) {
    const auto n = static_cast<std::size_t>(q.rows());
    Reach reach(n, std::vector<bool>(n, false));
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<std::size_t> stack{s};
        reach[s][s] = true;
        while (!stack.empty()) {
            const auto u = stack.back();
            stack.pop_back();
            for (std::size_t v = 0; v < n; ++v)
                if (v != u && !reach[s][v] &&
                    q(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) > kRateTol) {
                    reach[s][v] = true;
                    stack.push_back(v);
                }
        }
    }
    return reach;
}

void check_generator(const Matrix& q) {
    if (q.rows() < 1 || q.rows() != q.cols())
        throw InvalidArgument("generator must be a non-empty square matrix");
    if (!has_q_property(q))
        throw InvalidArgument("generator violates the q-property");
}

// Least-squares solve of [Q^T; 1^T] pi = [0; 1] for an irreducible generator.
Vector solve_irreducible(const Matrix& q) {
    const auto n = q.rows();
    Matrix a(n + 1, n);
    a.topRows(n) = q.transpose();
    a.row(n).setOnes();
    Vector b = Vector::Zero(n + 1);
    b[n] = 1.0;
    Vector pi = a.colPivHouseholderQr().solve(b);
    pi = pi.cwiseMax(0.0);
    return pi / pi.sum();
}

} // namespace

bool is_irreducible(const Matrix& q) {
    const auto reach = reachability(q);
    for (const auto& row : reach)
        for (bool r : row)
            if (!r)
                return false;
    return true;
}

std::vector<std::vector<Regime>> closed_classes(const Matrix& q) {
    const auto n = static_cast<std::size_t>(q.rows());
    const auto reach = reachability(q);
    std::vector<bool> seen(n, false);
    std::vector<std::vector<Regime>> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (seen[i])
            continue;
        std::vector<Regime> cls;
        for (std::size_t j = 0; j < n; ++j)
            if (reach[i][j] && reach[j][i]) {
                cls.push_back(j);
                seen[j] = true;
            }
        bool closed = true;
        for (auto u : cls)
            for (std::size_t v = 0; v < n; ++v)
                if (reach[u][v] && !reach[v][u])
                    closed = false;
        if (closed)
            out.push_back(std::move(cls));
    }
    return out;
}

StationaryDistribution stationary_distribution(const Matrix& q) {
    check_generator(q);
    const auto n = q.rows();
    StationaryDistribution out;
    out.unique = is_irreducible(q);
    if (out.unique) {
        out.pi = solve_irreducible(q);
    } else {
        const auto cls = closed_classes(q).front();
        const auto c = static_cast<Eigen::Index>(cls.size());
        Matrix sub(c, c);
        for (Eigen::Index a = 0; a < c; ++a)
            for (Eigen::Index b = 0; b < c; ++b)
                sub(a, b) = q(static_cast<Eigen::Index>(cls[a]), static_cast<Eigen::Index>(cls[b]));
        const Vector local = solve_irreducible(sub);
        out.pi = Vector::Zero(n);
        for (Eigen::Index a = 0; a < c; ++a)
            out.pi[static_cast<Eigen::Index>(cls[a])] = local[a];
    }
    const double residual = (out.pi.transpose() * q).cwiseAbs().maxCoeff();
    if (!out.pi.allFinite() || residual > 1e-8)
        throw NumericalFailure("stationary distribution residual " + std::to_string(residual) + " exceeds 1e-8");
    return out;
}

JumpSample sample_jump(const Matrix& q, Regime k, Rng& rng) {
    if (k >= static_cast<std::size_t>(q.rows()))
        throw InvalidArgument("regime index out of range");
    const auto kk = static_cast<Eigen::Index>(k);
    const double rate = -q(kk, kk);
    if (!(rate > 0.0))
        throw AbsorbingState(k);

    JumpSample out{rng.exponential(rate), k};
    const double u = rng.uniform() * rate;
    double cum = 0.0;
    for (Eigen::Index l = 0; l < q.cols(); ++l) {
        if (l == kk || !(q(kk, l) > 0.0))
            continue;
        cum += q(kk, l);
        out.next_regime = static_cast<Regime>(l);
        if (u < cum)
            break;
    }
    if (out.next_regime == k)
        throw NumericalFailure("regime " + std::to_string(k + 1) + " has a negative diagonal but no outgoing rate");
    return out;
}

Vector euler_transition_row(const GeneratorSpec& gen, const SimplexState& p, Regime k, double dt) {
    const Matrix q = gen.at(p);
    if (k >= static_cast<std::size_t>(q.rows()))
        throw InvalidArgument("regime index out of range");
    Vector row = dt * q.row(static_cast<Eigen::Index>(k)).transpose();
    row[static_cast<Eigen::Index>(k)] += 1.0;
    for (Eigen::Index l = 0; l < row.size(); ++l)
        if (!(row[l] >= 0.0 && row[l] <= 1.0))
            throw StepTooLarge("step too large: entry (" + std::to_string(k + 1) + "," + std::to_string(l + 1) +
                               ") of I + Q(P) dt is " + std::to_string(row[l]));
    return row;
}

Regime step_state_dependent(const GeneratorSpec& gen, const SimplexState& p, Regime k, double dt, Rng& rng) {
    const Vector row = euler_transition_row(gen, p, k, dt);
    const double u = rng.uniform();
    double cum = 0.0;
    Regime last = k;
    for (Eigen::Index l = 0; l < row.size(); ++l) {
        if (!(row[l] > 0.0))
            continue;
        cum += row[l];
        last = static_cast<Regime>(l);
        if (u < cum)
            return last;
    }
    // Rounding left cum marginally below u.
    return last;
}

} // namespace hyswitch
