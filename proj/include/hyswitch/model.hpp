#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace hyswitch {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Genotypes and regimes are 0-based throughout the library. Files and the
// command line use 1-based labels.
using Genotype = std::size_t;
using Regime = std::size_t;

inline constexpr double kSimplexSumTol = 1e-12;
inline constexpr double kSimplexNegTol = 1e-15;
inline constexpr double kGeneratorTol = 1e-12;

/// Fitness table w(i, k) of genotype i in environment k; one column per
/// environment. Construction only checks the shape; positivity and
/// per-environment distinctness are reported by validate_model().
class FitnessLandscape {
  public:
    FitnessLandscape() = default;
    explicit FitnessLandscape(Matrix w);

    std::size_t genotypes() const { return static_cast<std::size_t>(w_.rows()); }
    std::size_t environments() const { return static_cast<std::size_t>(w_.cols()); }

    double operator()(Genotype i, Regime k) const { return w_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)); }
    const Matrix& table() const { return w_; }
    /// Fitness column of environment k.
    Vector environment(Regime k) const { return w_.col(static_cast<Eigen::Index>(k)); }
    /// Row vector of genotype i across environments.
    Vector genotype(Genotype i) const { return w_.row(static_cast<Eigen::Index>(i)).transpose(); }

  private:
    Matrix w_;
};

/// Genotype frequency vector on the (m-1)-simplex.
class SimplexState {
  public:
    SimplexState() = default;
    /// Throws InvalidArgument unless the sum is 1 within 1e-12 and no entry
    /// is below -1e-15. Tiny negatives are clamped to 0.
    explicit SimplexState(Vector p);

    /// Vertex e_i of the (m-1)-simplex.
    static SimplexState vertex(std::size_t m, Genotype i);
    static SimplexState uniform(std::size_t m);
    /// Clamps negatives to zero and divides by the component sum. Throws
    /// NumericalFailure if the input is not finite or sums to zero.
    static SimplexState project(Vector p);

    std::size_t size() const { return static_cast<std::size_t>(p_.size()); }
    double operator[](std::size_t i) const { return p_[static_cast<Eigen::Index>(i)]; }
    const Vector& values() const { return p_; }

    /// Sup-norm distance to the vertex e_i, which equals 1 - P_i.
    double distance_to_vertex(Genotype i) const;
    /// Index of the nearest vertex in sup norm (largest component).
    Genotype nearest_vertex() const;

  private:
    Vector p_;
};

struct ConstantGenerator {
    Matrix q;
};

/// Q(P) = sum_i P_i * basis[i]; one basis matrix per genotype.
struct AffineGenerator {
    std::vector<Matrix> basis;
};

class GeneratorSpec {
  public:
    using Storage = std::variant<ConstantGenerator, AffineGenerator>;

    GeneratorSpec() = default;
    GeneratorSpec(ConstantGenerator g) : storage_(std::move(g)) {}
    GeneratorSpec(AffineGenerator g) : storage_(std::move(g)) {}

    bool is_constant() const { return std::holds_alternative<ConstantGenerator>(storage_); }
    const Storage& storage() const { return storage_; }
    /// Throws InvalidArgument for state-dependent generators.
    const Matrix& constant() const;
    const std::vector<Matrix>& basis() const;

    /// Regime count; 0 for an empty affine family.
    std::size_t dimension() const;
    /// Q evaluated at P. For a constant generator P is ignored.
    Matrix at(const SimplexState& p) const;

  private:
    Storage storage_ = ConstantGenerator{};
};

struct ModelSpec {
    FitnessLandscape landscape;
    GeneratorSpec generator;

    std::size_t genotypes() const { return landscape.genotypes(); }
    std::size_t environments() const { return landscape.environments(); }
};

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    // Informational: reducibility of the generator (per vertex for
    // state-dependent families).
    std::vector<std::string> notes;

    bool ok() const { return errors.empty(); }
};

/// Lists q-property violations of a single matrix, prefixed with `label`.
std::vector<std::string> q_property_violations(const Matrix& q, const std::string& label);
bool has_q_property(const Matrix& q);

ValidationReport validate_model(const ModelSpec& spec);

/// 64-bit FNV-1a hash of a canonical text rendering of the model.
std::uint64_t model_fingerprint(const ModelSpec& spec);
std::string fingerprint_hex(std::uint64_t fp);

} // namespace hyswitch
