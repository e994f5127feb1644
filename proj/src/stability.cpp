#include "hyswitch/stability.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hyswitch/rng.hpp"

namespace hyswitch {

Vector mean_fitness(const Vector& pi, const FitnessLandscape& landscape) {
    if (static_cast<std::size_t>(pi.size()) != landscape.environments())
        throw InvalidArgument("stationary distribution length does not match the environment count");
    return landscape.table() * pi;
}

Leader leading_genotype(const Vector& pi, const FitnessLandscape& landscape) {
    const Vector means = mean_fitness(pi, landscape);
    const double best = means.maxCoeff();
    Leader out;
    for (Eigen::Index i = 0; i < means.size(); ++i)
        if (means[i] >= best - kLeaderMargin)
            out.tied.push_back(static_cast<Genotype>(i));
    if (out.tied.size() == 1) {
        out.genotype = out.tied.front();
        out.tied.clear();
    }
    return out;
}

MeanFitnessReport mean_fitness_report(const FitnessLandscape& landscape, const Matrix& q) {
    MeanFitnessReport out;
    out.pi = stationary_distribution(q);
    out.means = mean_fitness(out.pi.pi, landscape);
    out.leader = leading_genotype(out.pi.pi, landscape);
    return out;
}

namespace {

// Point where mean_a - mean_b changes sign on the segment [from, to];
// positive at `from`, negative at `to`.
Vector bisect_boundary(const FitnessLandscape& landscape, const Vector& from, const Vector& to, Genotype a,
                       Genotype b) {
    const Vector diff = landscape.genotype(a) - landscape.genotype(b);
    const double span = (to - from).cwiseAbs().maxCoeff();
    double lo = 0.0;
    double hi = 1.0;
    while ((hi - lo) * span > 1e-11) {
        const double mid = 0.5 * (lo + hi);
        if (diff.dot(from + mid * (to - from)) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return from + 0.5 * (lo + hi) * (to - from);
}

void compositions(std::size_t parts, std::size_t total, std::vector<std::size_t>& cur,
                  std::vector<std::vector<std::size_t>>& out) {
    if (cur.size() + 1 == parts) {
        cur.push_back(total);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (std::size_t j = total + 1; j-- > 0;) {
        cur.push_back(j);
        compositions(parts, total - j, cur, out);
        cur.pop_back();
    }
}

} // namespace

PartitionMap partition_sweep(const FitnessLandscape& landscape, std::size_t resolution) {
    if (resolution < 1)
        throw InvalidArgument("grid resolution must be positive");
    const std::size_t n = landscape.environments();
    const auto res = static_cast<double>(resolution);
    PartitionMap out;

    auto add_point = [&](Vector pi) {
        out.means.push_back(mean_fitness(pi, landscape));
        out.winners.push_back(leading_genotype(pi, landscape));
        out.grid.push_back(std::move(pi));
    };
    auto bracket = [&](std::size_t i, std::size_t j) {
        const auto& wi = out.winners[i];
        const auto& wj = out.winners[j];
        if (wi.degenerate() || wj.degenerate() || *wi.genotype == *wj.genotype)
            return;
        out.boundaries.push_back(
            {bisect_boundary(landscape, out.grid[i], out.grid[j], *wi.genotype, *wj.genotype), *wi.genotype,
             *wj.genotype});
    };

    if (n == 1) {
        add_point(Vector::Ones(1));
        return out;
    }
    if (n == 2) {
        for (std::size_t j = 0; j <= resolution; ++j) {
            const double q = static_cast<double>(j) / res;
            Vector pi(2);
            pi << q, 1.0 - q;
            add_point(std::move(pi));
        }
        // Degenerate grid points are stepped over so the bracket spans them.
        std::optional<std::size_t> prev;
        for (std::size_t j = 0; j < out.grid.size(); ++j) {
            if (out.winners[j].degenerate())
                continue;
            if (prev)
                bracket(*prev, j);
            prev = j;
        }
        return out;
    }

    std::vector<std::vector<std::size_t>> comps;
    std::vector<std::size_t> cur;
    compositions(n, resolution, cur, comps);
    std::map<std::vector<std::size_t>, std::size_t> index;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        Vector pi(static_cast<Eigen::Index>(n));
        for (std::size_t k = 0; k < n; ++k)
            pi[static_cast<Eigen::Index>(k)] = static_cast<double>(comps[i][k]) / res;
        add_point(std::move(pi));
        index.emplace(comps[i], i);
    }
    // Each grid edge moves one unit of mass from coordinate u to v > u.
    for (std::size_t i = 0; i < comps.size(); ++i)
        for (std::size_t u = 0; u < n; ++u) {
            if (comps[i][u] == 0)
                continue;
            for (std::size_t v = u + 1; v < n; ++v) {
                auto nb = comps[i];
                --nb[u];
                ++nb[v];
                bracket(i, index.at(nb));
            }
        }
    return out;
}

namespace {

struct Setup {
    Vector pi;
    Genotype leader;
};

Setup certificate_setup(const FitnessLandscape& landscape, const Matrix& q) {
    const auto n = static_cast<Eigen::Index>(landscape.environments());
    if (q.rows() != n || q.cols() != n)
        throw CertificateError(CertificateError::Kind::Precondition,
                               "generator dimension does not match the environment count");
    if (!has_q_property(q))
        throw CertificateError(CertificateError::Kind::Precondition, "generator violates the q-property");
    const auto sd = stationary_distribution(q);
    if (!sd.unique)
        throw CertificateError(CertificateError::Kind::ResidualTooLarge,
                               "generator is reducible: its kernel is larger than span(1), so Q c = rhs has no "
                               "certified solution");
    const auto leader = leading_genotype(sd.pi, landscape);
    if (leader.degenerate())
        throw CertificateError(CertificateError::Kind::DegenerateLeader, "mean fitness is tied between genotypes",
                               leader.tied);
    return {sd.pi, *leader.genotype};
}

CertificateTerm solve_term(const Matrix& q, const Vector& pi, Genotype coordinate, const Vector& a, double beta,
                           const Vector& rhs) {
    const double orth = pi.dot(rhs);
    if (std::abs(orth) > 1e-10)
        throw CertificateError(CertificateError::Kind::ResidualTooLarge,
                               "right-hand side is not orthogonal to the kernel (pi . rhs = " +
                                   std::to_string(orth) + ")");
    const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(q);
    Vector c = cod.solve(rhs);
    const double residual = (q * c - rhs).cwiseAbs().maxCoeff();
    if (!(residual <= 1e-9))
        throw CertificateError(CertificateError::Kind::ResidualTooLarge,
                               "residual " + std::to_string(residual) + " of Q c = rhs exceeds 1e-9");
    return {coordinate, a, beta, std::move(c), residual, false};
}

void mark_positive_coefficients(StabilityCertificate& cert) {
    for (auto& term : cert.terms)
        term.coefficients_positive = ((1.0 - cert.gamma * term.c.array()) > 0.0).all();
}

} // namespace

StabilityCertificate build_stability_certificate(const FitnessLandscape& landscape, const Matrix& q) {
    const auto setup = certificate_setup(landscape, q);
    const auto n = static_cast<Eigen::Index>(landscape.environments());
    StabilityCertificate cert;
    cert.kind = CertificateKind::Stability;
    cert.target = setup.leader;
    cert.leader = setup.leader;
    cert.pi = setup.pi;

    const Vector w1 = landscape.genotype(setup.leader);
    double bound = 1.0;
    for (Genotype i = 0; i < landscape.genotypes(); ++i) {
        if (i == setup.leader)
            continue;
        const Vector a = landscape.genotype(i) - w1;
        const double beta = -setup.pi.dot(a);
        cert.terms.push_back(solve_term(q, setup.pi, i, a, beta, a + beta * Vector::Ones(n)));
        const auto& c = cert.terms.back().c;
        for (Eigen::Index k = 0; k < n; ++k) {
            const double ca = c[k] * a[k];
            if (ca < 0.0)
                bound = std::min(bound, -beta / ca);
            // keeps 1 - gamma c^k positive
            if (c[k] > 0.0)
                bound = std::min(bound, 1.0 / c[k]);
        }
    }
    cert.gamma_bound = bound;
    cert.gamma = 0.5 * bound;
    mark_positive_coefficients(cert);
    return cert;
}

StabilityCertificate build_instability_certificate(const FitnessLandscape& landscape, const Matrix& q,
                                                   Genotype target) {
    if (target >= landscape.genotypes())
        throw CertificateError(CertificateError::Kind::Precondition, "target genotype out of range");
    const auto setup = certificate_setup(landscape, q);
    if (target == setup.leader)
        throw CertificateError(CertificateError::Kind::Precondition,
                               "target genotype " + std::to_string(target + 1) +
                                   " is the leader; its vertex is stable, not unstable");
    const auto n = static_cast<Eigen::Index>(landscape.environments());
    StabilityCertificate cert;
    cert.kind = CertificateKind::Instability;
    cert.target = target;
    cert.leader = setup.leader;
    cert.pi = setup.pi;

    const Vector a = landscape.genotype(setup.leader) - landscape.genotype(target);
    const double beta = setup.pi.dot(a);
    cert.terms.push_back(solve_term(q, setup.pi, setup.leader, a, beta, a - beta * Vector::Ones(n)));
    const auto& c = cert.terms.back().c;
    double bound = -1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double ca = c[k] * a[k];
        if (ca < 0.0)
            bound = std::max(bound, beta / ca);
        if (c[k] < 0.0)
            bound = std::max(bound, 1.0 / c[k]);
    }
    cert.gamma_bound = bound;
    cert.gamma = 0.5 * bound;
    mark_positive_coefficients(cert);
    return cert;
}

Vector reduced_coordinates(const SimplexState& p, Genotype target) {
    if (target >= p.size())
        throw InvalidArgument("target genotype out of range");
    Vector x(static_cast<Eigen::Index>(p.size() - 1));
    Eigen::Index s = 0;
    for (std::size_t j = 0; j < p.size(); ++j)
        if (j != target)
            x[s++] = p[j];
    return x;
}

SimplexState from_reduced(const Vector& x, Genotype target) {
    const auto m = static_cast<std::size_t>(x.size()) + 1;
    if (target >= m)
        throw InvalidArgument("target genotype out of range");
    Vector p(static_cast<Eigen::Index>(m));
    Eigen::Index s = 0;
    for (std::size_t j = 0; j < m; ++j)
        p[static_cast<Eigen::Index>(j)] = j == target ? 1.0 - x.sum() : x[s++];
    return SimplexState::project(std::move(p));
}

double stochastic_lie_derivative(const RegimeFunction& g, const Vector& x, Regime k, const Vector& drift,
                                 const Matrix& q) {
    double out = drift.dot(g.gradient(x, k));
    const auto kk = static_cast<Eigen::Index>(k);
    for (Eigen::Index l = 0; l < q.cols(); ++l)
        out += q(kk, l) * g.value(x, static_cast<Regime>(l));
    return out;
}

namespace {

// Per-capita growth rate of reduced coordinate `slot`: G_j(x) / x_j.
double per_capita(const Vector& x, Eigen::Index slot, const Vector& a, ReducedForm form) {
    if (form == ReducedForm::Exact)
        return a[slot] - a.dot(x);
    double rest = 0.0;
    for (Eigen::Index l = 0; l < x.size(); ++l)
        if (l != slot)
            rest += a[slot] * x[l];
    return a[slot] * (1.0 - x[slot]) - rest;
}

// a^k_{j,target} for every reduced coordinate j.
Vector reduced_differences(Regime k, const FitnessLandscape& landscape, Genotype target) {
    const auto m = landscape.genotypes();
    Vector a(static_cast<Eigen::Index>(m - 1));
    Eigen::Index s = 0;
    for (Genotype j = 0; j < m; ++j)
        if (j != target)
            a[s++] = landscape(j, k) - landscape(target, k);
    return a;
}

} // namespace

Vector reduced_field(const Vector& x, Regime k, const FitnessLandscape& landscape, Genotype target,
                     ReducedForm form) {
    if (static_cast<std::size_t>(x.size()) + 1 != landscape.genotypes())
        throw InvalidArgument("reduced state has the wrong dimension");
    if (k >= landscape.environments() || target >= landscape.genotypes())
        throw InvalidArgument("index out of range");
    const Vector a = reduced_differences(k, landscape, target);
    Vector g(x.size());
    for (Eigen::Index s = 0; s < x.size(); ++s)
        g[s] = x[s] * per_capita(x, s, a, form);
    return g;
}

double CertificateFunction::value(const Vector& x, Regime k) const {
    double v = 0.0;
    const auto kk = static_cast<Eigen::Index>(k);
    for (const auto& t : cert_.terms)
        v += (1.0 - cert_.gamma * t.c[kk]) * std::pow(x[static_cast<Eigen::Index>(slot(t.coordinate))], cert_.gamma);
    return v;
}

Vector CertificateFunction::gradient(const Vector& x, Regime k) const {
    Vector g = Vector::Zero(x.size());
    const auto kk = static_cast<Eigen::Index>(k);
    const double gamma = cert_.gamma;
    for (const auto& t : cert_.terms) {
        const auto s = static_cast<Eigen::Index>(slot(t.coordinate));
        g[s] += gamma * (1.0 - gamma * t.c[kk]) * std::pow(x[s], gamma - 1.0);
    }
    return g;
}

double lie_derivative(const StabilityCertificate& cert, const Vector& x, Regime k, const FitnessLandscape& landscape,
                      const Matrix& q, ReducedForm form) {
    if (static_cast<std::size_t>(x.size()) + 1 != landscape.genotypes())
        throw InvalidArgument("reduced state has the wrong dimension");
    if (k >= landscape.environments() || static_cast<std::size_t>(q.rows()) != landscape.environments())
        throw InvalidArgument("regime index or generator dimension out of range");
    if ((x.array() < 0.0).any())
        throw InvalidArgument("reduced state has a negative coordinate");
    if ((x.array() == 0.0).all())
        throw InvalidArgument("V is not differentiable at the vertex");

    const Vector a = reduced_differences(k, landscape, cert.target);
    const double gamma = cert.gamma;
    const auto kk = static_cast<Eigen::Index>(k);
    double out = 0.0;
    for (const auto& t : cert.terms) {
        const auto s = static_cast<Eigen::Index>(t.coordinate < cert.target ? t.coordinate : t.coordinate - 1);
        if (x[s] == 0.0) {
            if (gamma < 0.0)
                throw InvalidArgument("V has a pole where the certificate coordinate vanishes");
            continue;
        }
        const double xg = std::pow(x[s], gamma);
        double jump = 0.0;
        for (Eigen::Index l = 0; l < q.cols(); ++l)
            jump += q(kk, l) * (1.0 - gamma * t.c[l]);
        // gamma (1 - gamma c^k) x^(gamma-1) * x * rate, written without the 0 * inf at x = 0
        out += gamma * (1.0 - gamma * t.c[kk]) * xg * per_capita(x, s, a, form) + jump * xg;
    }
    return out;
}

namespace {

constexpr std::size_t kChunk = 256;

struct ChunkMax {
    double value = -std::numeric_limits<double>::infinity();
    Vector point;
    Regime regime = 0;
};

// Uniform on {x >= 0, rho <= |x|_1 <= r} in d dimensions: radius from the
// d-th power law, direction from Dirichlet(1, ..., 1).
Vector sample_annulus(std::size_t d, double rho, double r, Rng& rng) {
    const double dd = static_cast<double>(d);
    const double lo = std::pow(rho, dd);
    const double hi = std::pow(r, dd);
    const double radius = std::pow(lo + rng.uniform() * (hi - lo), 1.0 / dd);
    Vector dir(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < dir.size(); ++i)
        dir[i] = rng.exponential(1.0);
    return radius * dir / dir.sum();
}

ChunkMax verify_chunk(const StabilityCertificate& cert, const FitnessLandscape& landscape, const Matrix& q,
                      double rho, double r, std::size_t begin, std::size_t end, std::uint64_t seed,
                      std::size_t chunk) {
    Rng rng(derive_seed(seed, chunk));
    const std::size_t d = landscape.genotypes() - 1;
    ChunkMax best;
    for (std::size_t s = begin; s < end; ++s) {
        const Vector x = sample_annulus(d, rho, r, rng);
        for (Regime k = 0; k < landscape.environments(); ++k) {
            const double v = lie_derivative(cert, x, k, landscape, q);
            if (v > best.value || std::isnan(v)) {
                best.value = std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
                best.point = x;
                best.regime = k;
            }
        }
    }
    return best;
}

} // namespace

VerificationReport verify_certificate(const StabilityCertificate& cert, const FitnessLandscape& landscape,
                                      const Matrix& q, double rho, double r, std::size_t samples, std::uint64_t seed,
                                      Execution exec) {
    if (landscape.genotypes() < 2)
        throw InvalidArgument("empty annulus: a single genotype has no reduced coordinates");
    if (!(rho > 0.0 && rho < r && r <= 1.0))
        throw InvalidArgument("empty annulus: need 0 < rho < r <= 1");
    if (samples < 1)
        throw InvalidArgument("empty annulus: no samples requested");

    const std::size_t chunks = (samples + kChunk - 1) / kChunk;
    std::vector<ChunkMax> partial(chunks);
    auto run = [&](std::size_t c) {
        partial[c] = verify_chunk(cert, landscape, q, rho, r, c * kChunk, std::min(samples, (c + 1) * kChunk), seed, c);
    };
    if (exec == Execution::Parallel) {
        const auto total = static_cast<long long>(chunks);
        std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(thread_count())
        for (long long c = 0; c < total; ++c) {
            try {
                run(static_cast<std::size_t>(c));
            } catch (...) {
#pragma omp critical
                if (!failure)
                    failure = std::current_exception();
            }
        }
        if (failure)
            std::rethrow_exception(failure);
    } else {
        for (std::size_t c = 0; c < chunks; ++c)
            run(c);
    }

    VerificationReport out;
    out.rho = rho;
    out.r = r;
    out.samples = samples;
    out.seed = seed;
    ChunkMax best;
    for (auto& p : partial)
        if (p.value > best.value)
            best = std::move(p);
    out.max_lie = best.value;
    out.worst_point = best.point;
    out.worst_regime = best.regime;
    out.pass = out.max_lie < 0.0;

    const CertificateFunction v(cert);
    const auto d = static_cast<Eigen::Index>(landscape.genotypes() - 1);
    const Vector dir = Vector::Constant(d, 1.0 / static_cast<double>(d));
    out.v_inner = -std::numeric_limits<double>::infinity();
    out.v_outer = -std::numeric_limits<double>::infinity();
    for (Regime k = 0; k < landscape.environments(); ++k) {
        out.v_inner = std::max(out.v_inner, v.value(rho * dir, k));
        out.v_outer = std::max(out.v_outer, v.value(r * dir, k));
    }
    out.boundary_ok =
        cert.kind == CertificateKind::Stability ? out.v_inner < out.v_outer : out.v_inner > out.v_outer;
    return out;
}

std::vector<LocalVertexAnalysis> local_analysis(const ModelSpec& spec) {
    std::vector<LocalVertexAnalysis> out;
    const auto m = spec.genotypes();
    for (Genotype i = 0; i < m; ++i) {
        const Matrix q = spec.generator.at(SimplexState::vertex(m, i));
        auto sd = stationary_distribution(q);
        Vector means = mean_fitness(sd.pi, spec.landscape);
        auto leader = leading_genotype(sd.pi, spec.landscape);
        const bool stable = leader.genotype && *leader.genotype == i;
        out.push_back({i, std::move(sd), std::move(means), std::move(leader), stable});
    }
    return out;
}

} // namespace hyswitch
