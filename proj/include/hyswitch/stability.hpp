#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hyswitch/errors.hpp"
#include "hyswitch/model.hpp"
#include "hyswitch/parallel.hpp"
#include "hyswitch/regime.hpp"

namespace hyswitch {

/// Mean fitnesses within this margin count as tied.
inline constexpr double kLeaderMargin = 1e-12;

/// Component i is pi . w_i, the stationary-average fitness of genotype i.
Vector mean_fitness(const Vector& pi, const FitnessLandscape& landscape);

struct Leader {
    std::optional<Genotype> genotype;
    std::vector<Genotype> tied; // non-empty iff degenerate

    bool degenerate() const { return !genotype.has_value(); }
};

/// Unique argmax of the mean fitnesses, or the tied set.
Leader leading_genotype(const Vector& pi, const FitnessLandscape& landscape);

struct MeanFitnessReport {
    Vector means;
    Leader leader;
    StationaryDistribution pi;
};

MeanFitnessReport mean_fitness_report(const FitnessLandscape& landscape, const Matrix& q);

struct PartitionBoundary {
    Vector pi;       // point on the regime simplex where the winner changes
    Genotype before; // winner on the side of the bracket's first grid point
    Genotype after;
};

struct PartitionMap {
    std::vector<Vector> grid;
    std::vector<Vector> means;
    std::vector<Leader> winners;
    std::vector<PartitionBoundary> boundaries;
};

/// Winner of every point of a regular grid over the regime simplex. Two
/// regimes: q = j / resolution with pi = (q, 1 - q). More regimes: the
/// barycentric grid with denominator `resolution`. Winner changes between
/// neighbouring grid points are located by bisection to 1e-9.
PartitionMap partition_sweep(const FitnessLandscape& landscape, std::size_t resolution);

enum class CertificateKind { Stability, Instability };

/// One summand (1 - gamma c^k) P_j^gamma of the Lyapunov function.
struct CertificateTerm {
    Genotype coordinate; // genotype j whose frequency the term depends on
    Vector a;            // fitness differences a^k driving the linearization
    double beta;
    Vector c;            // minimum-norm solution of Q c = a + beta 1 (stability) or a - beta 1
    double residual;     // ||Q c - rhs||_inf
    bool coefficients_positive;
};

struct StabilityCertificate {
    CertificateKind kind = CertificateKind::Stability;
    Genotype target = 0; // vertex the certificate is about
    Genotype leader = 0;
    Vector pi;
    std::vector<CertificateTerm> terms;
    double gamma = 0.0;
    double gamma_bound = 0.0; // admissible gammas lie strictly between 0 and this
};

class CertificateError : public Error {
  public:
    enum class Kind { DegenerateLeader, ResidualTooLarge, Precondition };

    CertificateError(Kind kind, const std::string& what, std::vector<Genotype> tied = {})
        : Error(what), kind_(kind), tied_(std::move(tied)) {}
    Kind kind() const { return kind_; }
    const std::vector<Genotype>& tied() const { return tied_; }

  private:
    Kind kind_;
    std::vector<Genotype> tied_;
};

/// Lyapunov certificate that the leader's vertex is asymptotically stable in
/// probability. gamma is half the admissible bound.
StabilityCertificate build_stability_certificate(const FitnessLandscape& landscape, const Matrix& q);

/// Certificate that vertex `target` (not the leader) is unstable in
/// probability; V depends on the leader's frequency and has a pole at the
/// vertex.
StabilityCertificate build_instability_certificate(const FitnessLandscape& landscape, const Matrix& q,
                                                   Genotype target);

/// Reduced coordinates drop the target genotype and keep the original order.
Vector reduced_coordinates(const SimplexState& p, Genotype target);
SimplexState from_reduced(const Vector& x, Genotype target);

/// g(x, k): one scalar function of the reduced state per regime.
class RegimeFunction {
  public:
    virtual ~RegimeFunction() = default;
    virtual double value(const Vector& x, Regime k) const = 0;
    virtual Vector gradient(const Vector& x, Regime k) const = 0;
};

/// L g(x, k) = drift . grad g(x, k) + sum_l q_kl g(x, l).
double stochastic_lie_derivative(const RegimeFunction& g, const Vector& x, Regime k, const Vector& drift,
                                 const Matrix& q);

/// Which reduced vector field to use. AsPrinted puts a_{i,1} in place of
/// a_{j,1} inside the interaction sum; it exists only for comparison.
enum class ReducedForm { Exact, AsPrinted };

/// Reduced replicator field around vertex `target`, in reduced coordinates.
Vector reduced_field(const Vector& x, Regime k, const FitnessLandscape& landscape, Genotype target,
                     ReducedForm form = ReducedForm::Exact);

class CertificateFunction : public RegimeFunction {
  public:
    explicit CertificateFunction(StabilityCertificate cert) : cert_(std::move(cert)) {}

    const StabilityCertificate& certificate() const { return cert_; }
    double value(const Vector& x, Regime k) const override;
    Vector gradient(const Vector& x, Regime k) const override;

  private:
    std::size_t slot(Genotype j) const { return j < cert_.target ? j : j - 1; }
    StabilityCertificate cert_;
};

/// L V for the certificate's V against the full nonlinear reduced field.
/// Coordinates with value 0 contribute 0 when gamma > 0. Throws
/// InvalidArgument at the vertex, for negative coordinates, or where
/// gamma < 0 puts a pole.
double lie_derivative(const StabilityCertificate& cert, const Vector& x, Regime k, const FitnessLandscape& landscape,
                      const Matrix& q, ReducedForm form = ReducedForm::Exact);

struct VerificationReport {
    double rho = 0.0;
    double r = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    double max_lie = 0.0;
    Vector worst_point;
    Regime worst_regime = 0;
    // V at rho and r along the diagonal direction, maximized over regimes.
    double v_inner = 0.0;
    double v_outer = 0.0;
    bool boundary_ok = false; // V shrinks (stability) or blows up (instability) toward the vertex
    bool pass = false;        // max_lie < 0
};

inline constexpr double kDefaultAnnulusInner = 1e-4;
inline constexpr double kDefaultAnnulusOuter = 0.05;

/// Samples reduced states uniformly in {x >= 0, rho <= |x|_1 <= r} and
/// evaluates L V at every (point, regime) pair. PASS iff the maximum is
/// negative. Results do not depend on `exec` or the thread count.
VerificationReport verify_certificate(const StabilityCertificate& cert, const FitnessLandscape& landscape,
                                      const Matrix& q, double rho, double r, std::size_t samples, std::uint64_t seed,
                                      Execution exec = Execution::Parallel);

/// Heuristic local analysis of a vertex under a state-dependent generator:
/// the leader under a stationary distribution of Q(e_i).
struct LocalVertexAnalysis {
    Genotype vertex;
    StationaryDistribution pi;
    Vector means;
    Leader leader;
    bool locally_stable; // leader is this vertex
};

std::vector<LocalVertexAnalysis> local_analysis(const ModelSpec& spec);

} // namespace hyswitch
