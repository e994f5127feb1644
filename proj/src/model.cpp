#include "hyswitch/model.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "hyswitch/errors.hpp"
#include "hyswitch/regime.hpp"

namespace hyswitch {

FitnessLandscape::FitnessLandscape(Matrix w) : w_(std::move(w)) {
    if (w_.rows() < 1 || w_.cols() < 1)
        throw InvalidArgument("fitness landscape needs at least one genotype and one environment");
}

SimplexState::SimplexState(Vector p) : p_(std::move(p)) {
    if (p_.size() < 1)
        throw InvalidArgument("simplex state must have at least one component");
    for (Eigen::Index i = 0; i < p_.size(); ++i) {
        if (!std::isfinite(p_[i]))
            throw InvalidArgument("simplex state has a non-finite component");
        if (p_[i] < -kSimplexNegTol)
            throw InvalidArgument("simplex state has a negative component");
    }
    if (std::abs(p_.sum() - 1.0) > kSimplexSumTol)
        throw InvalidArgument("simplex state components do not sum to 1");
    p_ = p_.cwiseMax(0.0);
}

SimplexState SimplexState::vertex(std::size_t m, Genotype i) {
    if (i >= m)
        throw InvalidArgument("vertex index out of range");
    Vector p = Vector::Zero(static_cast<Eigen::Index>(m));
    p[static_cast<Eigen::Index>(i)] = 1.0;
    return SimplexState(std::move(p));
}

SimplexState SimplexState::uniform(std::size_t m) {
    return project(Vector::Ones(static_cast<Eigen::Index>(m)));
}

SimplexState SimplexState::project(Vector p) {
    if (!p.allFinite())
        throw NumericalFailure("non-finite state");
    p = p.cwiseMax(0.0);
    const double s = p.sum();
    if (!(s > 0.0))
        throw NumericalFailure("state collapsed to zero");
    SimplexState out;
    out.p_ = p / s;
    return out;
}

double SimplexState::distance_to_vertex(Genotype i) const {
    // max(1 - P_i, max_{j != i} P_j) and the second term never exceeds the first.
    return 1.0 - p_[static_cast<Eigen::Index>(i)];
}

Genotype SimplexState::nearest_vertex() const {
    Eigen::Index best = 0;
    p_.maxCoeff(&best);
    return static_cast<Genotype>(best);
}

const Matrix& GeneratorSpec::constant() const {
    if (const auto* c = std::get_if<ConstantGenerator>(&storage_))
        return c->q;
    throw InvalidArgument("generator is state-dependent; a constant generator is required");
}

const std::vector<Matrix>& GeneratorSpec::basis() const {
    if (const auto* a = std::get_if<AffineGenerator>(&storage_))
        return a->basis;
    throw InvalidArgument("generator is constant; no affine basis");
}

std::size_t GeneratorSpec::dimension() const {
    if (const auto* c = std::get_if<ConstantGenerator>(&storage_))
        return static_cast<std::size_t>(c->q.rows());
    const auto& b = std::get<AffineGenerator>(storage_).basis;
    return b.empty() ? 0 : static_cast<std::size_t>(b.front().rows());
}

Matrix GeneratorSpec::at(const SimplexState& p) const {
    if (const auto* c = std::get_if<ConstantGenerator>(&storage_))
        return c->q;
    const auto& b = std::get<AffineGenerator>(storage_).basis;
    if (b.size() != p.size())
        throw InvalidArgument("affine generator basis count does not match the state dimension");
    Matrix q = Matrix::Zero(b.front().rows(), b.front().cols());
    for (std::size_t i = 0; i < b.size(); ++i)
        q += p[i] * b[i];
    return q;
}

std::vector<std::string> q_property_violations(const Matrix& q, const std::string& label) {
    std::vector<std::string> out;
    if (q.rows() != q.cols()) {
        out.push_back(label + ": generator is not square");
        return out;
    }
    for (Eigen::Index k = 0; k < q.rows(); ++k) {
        const std::string row = std::to_string(k + 1);
        if (!q.row(k).allFinite()) {
            out.push_back(label + ": q-property violated at row " + row + " (non-finite entry)");
            continue;
        }
        for (Eigen::Index l = 0; l < q.cols(); ++l) {
            if (l != k && q(k, l) < -kGeneratorTol)
                out.push_back(label + ": q-property violated at row " + row + " (negative off-diagonal in column " +
                              std::to_string(l + 1) + ")");
        }
        if (std::abs(q.row(k).sum()) > kGeneratorTol)
            out.push_back(label + ": q-property violated at row " + row + " (row sum != 0)");
    }
    return out;
}

bool has_q_property(const Matrix& q) { return q_property_violations(q, "").empty(); }

namespace {

void append(std::vector<std::string>& dst, std::vector<std::string> src) {
    dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
}

std::string reducibility_note(const Matrix& q, const std::string& label) {
    return label + (is_irreducible(q) ? ": irreducible" : ": reducible");
}

} // namespace

ValidationReport validate_model(const ModelSpec& spec) {
    ValidationReport r;
    const auto& w = spec.landscape.table();
    const auto m = w.rows();
    const auto n = w.cols();
    if (m < 1 || n < 1) {
        r.errors.push_back("fitness landscape is empty");
        return r;
    }
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index k = 0; k < n; ++k)
            if (!(std::isfinite(w(i, k)) && w(i, k) > 0.0))
                r.errors.push_back("fitness of genotype " + std::to_string(i + 1) + " in environment " +
                                   std::to_string(k + 1) + " is not positive");
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = i + 1; j < m; ++j)
                if (w(i, k) == w(j, k))
                    r.warnings.push_back("genotypes " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                                         " have equal fitness in environment " + std::to_string(k + 1));

    const auto& storage = spec.generator.storage();
    if (const auto* c = std::get_if<ConstantGenerator>(&storage)) {
        if (c->q.rows() != n || c->q.cols() != n) {
            r.errors.push_back("generator dimension " + std::to_string(c->q.rows()) + "x" +
                               std::to_string(c->q.cols()) + " does not match " + std::to_string(n) +
                               " environments");
            return r;
        }
        append(r.errors, q_property_violations(c->q, "Q"));
        if (r.ok())
            r.notes.push_back(reducibility_note(c->q, "Q"));
    } else {
        const auto& basis = std::get<AffineGenerator>(storage).basis;
        if (static_cast<Eigen::Index>(basis.size()) != m) {
            r.errors.push_back("affine generator has " + std::to_string(basis.size()) + " basis matrices; expected " +
                               std::to_string(m));
            return r;
        }
        for (std::size_t i = 0; i < basis.size(); ++i) {
            const std::string label = "Q^(" + std::to_string(i + 1) + ")";
            if (basis[i].rows() != n || basis[i].cols() != n) {
                r.errors.push_back(label + " dimension does not match " + std::to_string(n) + " environments");
                continue;
            }
            append(r.errors, q_property_violations(basis[i], label));
        }
        // Q(e_i) is the i-th basis matrix.
        if (r.ok())
            for (std::size_t i = 0; i < basis.size(); ++i)
                r.notes.push_back(reducibility_note(basis[i], "Q(e_" + std::to_string(i + 1) + ")"));
    }
    return r;
}

namespace {

void render(std::ostringstream& os, const Matrix& a) {
    char buf[40];
    os << a.rows() << 'x' << a.cols() << ':';
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,", a(i, j));
            os << buf;
        }
    os << ';';
}

} // namespace

std::uint64_t model_fingerprint(const ModelSpec& spec) {
    std::ostringstream os;
    os << "hyswitch-model/1;w=";
    render(os, spec.landscape.table());
    if (spec.generator.is_constant()) {
        os << "constant=";
        render(os, spec.generator.constant());
    } else {
        os << "affine=";
        for (const auto& b : spec.generator.basis())
            render(os, b);
    }
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : os.str()) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fingerprint_hex(std::uint64_t fp) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fp));
    return buf;
}

} // namespace hyswitch
