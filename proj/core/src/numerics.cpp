#include "fockdyson/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

namespace fockdyson::numerics {

namespace {

SparseStorage pruned(SparseStorage m) {
    m.prune([](Index, Index, const Complex& v) { return v != Complex(0.0, 0.0); });
    m.makeCompressed();
    return m;
}

double max_abs_coeff(const SparseStorage& m) {
    double best = 0.0;
    for (Index k = 0; k < m.outerSize(); ++k)
        for (SparseStorage::InnerIterator it(m, k); it; ++it) best = std::max(best, std::abs(it.value()));
    return best;
}

// Plain union-find with path halving.
struct DisjointSets {
    std::vector<Index> parent;
    explicit DisjointSets(Index n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), Index{0});
    }
    Index find(Index x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(Index a, Index b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) std::swap(a, b);
        parent[a] = b;
    }
};

std::vector<std::vector<Index>> collect(DisjointSets& sets, Index dim) {
    std::vector<Index> slot(static_cast<std::size_t>(dim), -1);
    std::vector<std::vector<Index>> out;
    for (Index i = 0; i < dim; ++i) {
        const Index root = sets.find(i);
        if (slot[root] < 0) {
            slot[root] = static_cast<Index>(out.size());
            out.emplace_back();
        }
        out[slot[root]].push_back(i);
    }
    return out;
}

void require_hermitian(const ComplexSparseMatrix& m, const Tolerances& tol) {
    if (m.hermitian()) return;
    const double defect = hermitian_defect(m.storage());
    if (defect > tol.hermitian) {
        std::ostringstream msg;
        msg << "matrix is not Hermitian: max |M - M^dagger| = " << defect;
        throw NotHermitianError(msg.str(), defect);
    }
    std::ostringstream msg;
    msg << "matrix lacks the Hermitian flag (max asymmetry " << defect << ")";
    throw NotHermitianError(msg.str(), defect);
}

}  // namespace

const Tolerances& default_tolerances() {
    static const Tolerances tol{};
    return tol;
}

double hermitian_defect(const SparseStorage& m) {
    if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
    const SparseStorage diff = m - SparseStorage(m.adjoint());
    return max_abs_coeff(diff);
}

double hermitian_defect(const CMatrix& m) {
    if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
    if (m.size() == 0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// ComplexSparseMatrix

ComplexSparseMatrix::ComplexSparseMatrix(SparseStorage storage, bool hermitian,
                                         const Tolerances& tol)
    : storage_(pruned(std::move(storage))), hermitian_(hermitian) {
    if (storage_.rows() != storage_.cols()) {
        std::ostringstream msg;
        msg << "operator matrix must be square, got " << storage_.rows() << "x" << storage_.cols();
        throw DimensionError(msg.str());
    }
    for (Index k = 0; k < storage_.outerSize(); ++k)
        for (SparseStorage::InnerIterator it(storage_, k); it; ++it)
            if (!std::isfinite(it.value().real()) || !std::isfinite(it.value().imag()))
                throw Error("matrix contains a non-finite entry");
    if (hermitian_) {
        const double defect = hermitian_defect(storage_);
        if (defect > tol.hermitian) {
            std::ostringstream msg;
            msg << "matrix flagged Hermitian deviates by max |M - M^dagger| = " << defect
                << " (tolerance " << tol.hermitian << ")";
            throw NotHermitianError(msg.str(), defect);
        }
    }
}

ComplexSparseMatrix ComplexSparseMatrix::from_triplets(Index dim, std::span<const Triplet> triplets,
                                                       bool hermitian, const Tolerances& tol) {
    for (const auto& t : triplets) {
        if (t.row() < 0 || t.col() < 0 || t.row() >= dim || t.col() >= dim)
            throw DimensionError("triplet index out of range for dimension " + std::to_string(dim));
    }
    SparseStorage s(dim, dim);
    s.setFromTriplets(triplets.begin(), triplets.end());
    return ComplexSparseMatrix(std::move(s), hermitian, tol);
}

ComplexSparseMatrix ComplexSparseMatrix::from_dense(const CMatrix& dense, bool hermitian,
                                                    const Tolerances& tol) {
    return ComplexSparseMatrix(SparseStorage(dense.sparseView(Complex(0.0), 0.0)), hermitian, tol);
}

ComplexSparseMatrix ComplexSparseMatrix::identity(Index dim) {
    SparseStorage s(dim, dim);
    s.setIdentity();
    return ComplexSparseMatrix(std::move(s), true);
}

ComplexSparseMatrix ComplexSparseMatrix::zero(Index dim) {
    return ComplexSparseMatrix(SparseStorage(dim, dim), true);
}

ComplexSparseMatrix ComplexSparseMatrix::diagonal(const RVector& values) {
    const Index n = values.size();
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
        if (values[i] != 0.0) t.emplace_back(i, i, Complex(values[i], 0.0));
    return from_triplets(n, t, true);
}

CVector ComplexSparseMatrix::operator*(const CVector& v) const {
    if (v.size() != dim())
        throw DimensionError("vector length " + std::to_string(v.size()) +
                             " does not match operator dimension " + std::to_string(dim()));
    return storage_ * v;
}

bool ComplexSparseMatrix::is_diagonal() const {
    for (Index k = 0; k < storage_.outerSize(); ++k)
        for (SparseStorage::InnerIterator it(storage_, k); it; ++it)
            if (it.row() != it.col()) return false;
    return true;
}

double ComplexSparseMatrix::max_abs() const { return max_abs_coeff(storage_); }

ComplexSparseMatrix operator+(const ComplexSparseMatrix& a, const ComplexSparseMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionError("cannot add operators of different dimension");
    return ComplexSparseMatrix(SparseStorage(a.storage() + b.storage()),
                               a.hermitian() && b.hermitian());
}

ComplexSparseMatrix operator*(Complex s, const ComplexSparseMatrix& a) {
    return ComplexSparseMatrix(SparseStorage(s * a.storage()), a.hermitian() && s.imag() == 0.0);
}

ComplexSparseMatrix product(const ComplexSparseMatrix& a, const ComplexSparseMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionError("cannot multiply operators of different dimension");
    return ComplexSparseMatrix(SparseStorage(a.storage() * b.storage()), false);
}

ComplexSparseMatrix adjoint(const ComplexSparseMatrix& a) {
    return ComplexSparseMatrix(SparseStorage(a.storage().adjoint()), a.hermitian());
}

ComplexSparseMatrix kron(const ComplexSparseMatrix& a, const ComplexSparseMatrix& b) {
    SparseStorage k = Eigen::kroneckerProduct(a.storage(), b.storage());
    return ComplexSparseMatrix(std::move(k), a.hermitian() && b.hermitian());
}

double commutator_max(const ComplexSparseMatrix& a, const ComplexSparseMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionError("commutator of operators of different dimension");
    const SparseStorage c = a.storage() * b.storage() - b.storage() * a.storage();
    return max_abs_coeff(c);
}

std::vector<std::vector<Index>> connected_components(const SparseStorage& m) {
    const SparseStorage* one[] = {&m};
    return connected_components(one, m.rows());
}

std::vector<std::vector<Index>> connected_components(std::span<const SparseStorage* const> ms,
                                                     Index dim) {
    DisjointSets sets(dim);
    for (const SparseStorage* m : ms) {
        if (m->rows() != dim || m->cols() != dim)
            throw DimensionError("connected_components: dimension mismatch");
        for (Index k = 0; k < m->outerSize(); ++k)
            for (SparseStorage::InnerIterator it(*m, k); it; ++it)
                if (it.row() != it.col()) sets.unite(it.row(), it.col());
    }
    return collect(sets, dim);
}

// ---------------------------------------------------------------------------
// SpectralDecomposition

SpectralDecomposition SpectralDecomposition::compute(const ComplexSparseMatrix& m,
                                                     const Tolerances& tol) {
    require_hermitian(m, tol);
    const SparseStorage& s = m.storage();
    SpectralDecomposition d;
    d.dim_ = m.dim();
    auto components = connected_components(s);
    d.blocks_.reserve(components.size());
    d.offsets_.reserve(components.size());

    std::vector<Index> local(static_cast<std::size_t>(d.dim_), -1);
    Index offset = 0;
    for (auto& support : components) {
        const Index n = static_cast<Index>(support.size());
        if (n > tol.dense_limit) {
            std::ostringstream msg;
            msg << "invariant block of size " << n << " exceeds the dense eigensolver limit "
                << tol.dense_limit;
            throw SizeLimitError(msg.str(), static_cast<double>(n));
        }
        Block b;
        if (n == 1) {
            b.values = RVector::Constant(1, s.coeff(support[0], support[0]).real());
            b.vectors = CMatrix::Identity(1, 1);
        } else {
            for (Index i = 0; i < n; ++i) local[support[i]] = i;
            CMatrix dense = CMatrix::Zero(n, n);
            for (Index j = 0; j < n; ++j)
                for (SparseStorage::InnerIterator it(s, support[j]); it; ++it)
                    dense(local[it.row()], j) = it.value();
            Eigen::SelfAdjointEigenSolver<CMatrix> solver(dense);
            if (solver.info() != Eigen::Success) throw Error("Hermitian eigensolver failed to converge");
            b.values = solver.eigenvalues();
            b.vectors = solver.eigenvectors();
            for (Index i = 0; i < n; ++i) local[support[i]] = -1;
        }
        b.support = std::move(support);
        d.offsets_.push_back(offset);
        offset += n;
        d.blocks_.push_back(std::move(b));
    }

    d.block_values_.resize(d.dim_);
    for (std::size_t k = 0; k < d.blocks_.size(); ++k)
        d.block_values_.segment(d.offsets_[k], d.blocks_[k].values.size()) = d.blocks_[k].values;
    return d;
}

RVector SpectralDecomposition::eigenvalues() const {
    RVector v = block_values_;
    std::sort(v.data(), v.data() + v.size());
    return v;
}

CMatrix SpectralDecomposition::eigenvectors() const {
    std::vector<Index> order(static_cast<std::size_t>(dim_));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return block_values_[a] < block_values_[b]; });
    // Column (block position) -> (block, local column).
    std::vector<std::pair<std::size_t, Index>> where(static_cast<std::size_t>(dim_));
    for (std::size_t k = 0; k < blocks_.size(); ++k)
        for (Index j = 0; j < blocks_[k].values.size(); ++j) where[offsets_[k] + j] = {k, j};

    CMatrix w = CMatrix::Zero(dim_, dim_);
    for (Index col = 0; col < dim_; ++col) {
        const auto [k, j] = where[order[col]];
        const Block& b = blocks_[k];
        for (std::size_t i = 0; i < b.support.size(); ++i) w(b.support[i], col) = b.vectors(i, j);
    }
    return w;
}

CVector SpectralDecomposition::to_eigen(const CVector& v) const {
    if (v.size() != dim_) throw DimensionError("to_eigen: vector length mismatch");
    CVector c(dim_);
    CVector local;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
        const Block& b = blocks_[k];
        const Index n = static_cast<Index>(b.support.size());
        if (n == 1) {
            c[offsets_[k]] = std::conj(b.vectors(0, 0)) * v[b.support[0]];
            continue;
        }
        local.resize(n);
        for (Index i = 0; i < n; ++i) local[i] = v[b.support[i]];
        c.segment(offsets_[k], n).noalias() = b.vectors.adjoint() * local;
    }
    return c;
}

CVector SpectralDecomposition::from_eigen(const CVector& c) const {
    if (c.size() != dim_) throw DimensionError("from_eigen: vector length mismatch");
    CVector v(dim_);
    CVector local;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
        const Block& b = blocks_[k];
        const Index n = static_cast<Index>(b.support.size());
        if (n == 1) {
            v[b.support[0]] = b.vectors(0, 0) * c[offsets_[k]];
            continue;
        }
        local.noalias() = b.vectors * c.segment(offsets_[k], n);
        for (Index i = 0; i < n; ++i) v[b.support[i]] = local[i];
    }
    return v;
}

CVector SpectralDecomposition::apply(const std::function<Complex(double)>& f,
                                     const CVector& v) const {
    CVector c = to_eigen(v);
    for (Index i = 0; i < dim_; ++i) c[i] *= f(block_values_[i]);
    return from_eigen(c);
}

ComplexSparseMatrix SpectralDecomposition::function(const std::function<Complex(double)>& f,
                                                    bool hermitian) const {
    std::vector<Triplet> t;
    for (const Block& b : blocks_) {
        const Index n = static_cast<Index>(b.support.size());
        CVector fv(n);
        for (Index i = 0; i < n; ++i) fv[i] = f(b.values[i]);
        CMatrix m = b.vectors * fv.asDiagonal() * b.vectors.adjoint();
        if (hermitian) m = (0.5 * (m + m.adjoint())).eval();
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < n; ++i)
                if (m(i, j) != Complex(0.0)) t.emplace_back(b.support[i], b.support[j], m(i, j));
    }
    return ComplexSparseMatrix::from_triplets(dim_, t, hermitian);
}

double SpectralDecomposition::min_eigenvalue() const {
    return dim_ == 0 ? 0.0 : block_values_.minCoeff();
}

double SpectralDecomposition::max_eigenvalue() const {
    return dim_ == 0 ? 0.0 : block_values_.maxCoeff();
}

std::vector<double> SpectralDecomposition::levels(double grouping) const {
    const RVector sorted = eigenvalues();
    std::vector<double> out;
    Index start = 0;
    for (Index i = 1; i <= sorted.size(); ++i) {
        if (i == sorted.size() || sorted[i] - sorted[start] > grouping) {
            out.push_back(sorted.segment(start, i - start).mean());
            start = i;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exponential and projections

CMatrix matexp(const ComplexSparseMatrix& m, double t, const Tolerances& tol) {
    return matexp(SpectralDecomposition::compute(m, tol), t);
}

CMatrix matexp(const SpectralDecomposition& d, double t) {
    const Index dim = d.dim();
    CMatrix u = CMatrix::Zero(dim, dim);
    for (const auto& b : d.blocks()) {
        const Index n = static_cast<Index>(b.support.size());
        CVector phase(n);
        for (Index i = 0; i < n; ++i) phase[i] = std::polar(1.0, -t * b.values[i]);
        const CMatrix block = b.vectors * phase.asDiagonal() * b.vectors.adjoint();
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < n; ++i) u(b.support[i], b.support[j]) = block(i, j);
    }
    return u;
}

CVector evolve(const SpectralDecomposition& d, double t, const CVector& v) {
    return d.apply([t](double lambda) { return std::polar(1.0, -t * lambda); }, v);
}

SpectralProjection spectral_projection(const ComplexSparseMatrix& m, double lo, double hi,
                                       const Tolerances& tol) {
    return spectral_projection(SpectralDecomposition::compute(m, tol), lo, hi, tol);
}

SpectralProjection spectral_projection(const SpectralDecomposition& d, double lo, double hi,
                                       const Tolerances& tol) {
    if (!(lo <= hi)) throw Error("spectral_projection: interval requires lo <= hi");
    SpectralProjection out;
    std::vector<Triplet> t;
    for (const auto& b : d.blocks()) {
        std::vector<Index> selected;
        for (Index i = 0; i < b.values.size(); ++i) {
            const double lambda = b.values[i];
            if (std::abs(lambda - lo) <= tol.boundary_tie || std::abs(lambda - hi) <= tol.boundary_tie)
                out.boundary_tie = true;
            if (lambda >= lo - tol.boundary_tie && lambda <= hi + tol.boundary_tie)
                selected.push_back(i);
        }
        if (selected.empty()) continue;
        out.rank += static_cast<Index>(selected.size());
        const Index n = static_cast<Index>(b.support.size());
        if (n == 1) {
            t.emplace_back(b.support[0], b.support[0], Complex(1.0, 0.0));
            continue;
        }
        CMatrix v(n, static_cast<Index>(selected.size()));
        for (std::size_t c = 0; c < selected.size(); ++c) v.col(c) = b.vectors.col(selected[c]);
        CMatrix p = v * v.adjoint();
        p = (0.5 * (p + p.adjoint())).eval();
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < n; ++i)
                if (p(i, j) != Complex(0.0)) t.emplace_back(b.support[i], b.support[j], p(i, j));
    }
    out.matrix = ComplexSparseMatrix::from_triplets(d.dim(), t, true);
    return out;
}

}  // namespace fockdyson::numerics
