// numerics.hpp: complex sparse/dense linear algebra substrate
//
// Every operator in the library is stored as a ComplexSparseMatrix. Hermitian
// matrices can be diagonalised exactly (block by block, one dense eigensolve per
// connected component of the sparsity graph) into a SpectralDecomposition, which
// backs the matrix exponential, spectral projections and functional calculus.

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "fockdyson/errors.hpp"

namespace fockdyson {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using SparseStorage = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<Complex>;

}  // namespace fockdyson

namespace fockdyson::numerics {

// All numerical tolerances used by the library, with their defaults.
struct Tolerances {
    double hermitian = 1e-13;              // max |M - M^dagger| entry for a Hermitian flag
    double exp_unitarity = 1e-11;          // matexp result unitary within
    double eigvec_unitarity = 1e-12;       // eigenvector matrix unitary within
    double projection = 1e-12;             // P^2 = P = P^dagger within
    double boundary_tie = 1e-9;            // interval end this close to an eigenvalue warns
    double level_grouping = 1e-9;          // eigenvalues this close form one level
    double nonnegativity = 1e-12;          // min eigenvalue >= -this counts as non-negative
    double commutator = 1e-12;             // max-entry norm of [A, H0]
    double projection_commutator = 1e-11;  // max-entry norm of [E_A({l}), H0]
    double band_residual = 1e-12;          // operator-norm residual of band leakage
    double cp_defect = 1e-12;              // CP-invariance defect
    double support = 1e-12;                // relative amplitude counted as support
    Index dense_limit = 5000;              // largest block handled by a dense eigensolve
};

const Tolerances& default_tolerances();

// Max entrywise |M_ij - conj(M_ji)|.
double hermitian_defect(const SparseStorage& m);
double hermitian_defect(const CMatrix& m);

// Square complex sparse matrix with a verified Hermitian flag. No explicit zeros
// are stored. Immutable after construction.
class ComplexSparseMatrix {
public:
    ComplexSparseMatrix() = default;

    // Throws DimensionError for non-square input and NotHermitianError if
    // `hermitian` is set but the matrix deviates by more than tol.hermitian.
    ComplexSparseMatrix(SparseStorage storage, bool hermitian,
                        const Tolerances& tol = default_tolerances());

    // Duplicate triplets are summed; indices must be < dim.
    static ComplexSparseMatrix from_triplets(Index dim, std::span<const Triplet> triplets,
                                             bool hermitian,
                                             const Tolerances& tol = default_tolerances());
    static ComplexSparseMatrix from_dense(const CMatrix& dense, bool hermitian,
                                          const Tolerances& tol = default_tolerances());
    static ComplexSparseMatrix identity(Index dim);
    static ComplexSparseMatrix zero(Index dim);
    static ComplexSparseMatrix diagonal(const RVector& values);

    Index dim() const noexcept { return storage_.rows(); }
    Index nnz() const noexcept { return storage_.nonZeros(); }
    bool hermitian() const noexcept { return hermitian_; }
    const SparseStorage& storage() const noexcept { return storage_; }

    CVector operator*(const CVector& v) const;
    CMatrix to_dense() const { return CMatrix(storage_); }

    // True iff every stored entry sits on the diagonal.
    bool is_diagonal() const;
    double max_abs() const;

private:
    SparseStorage storage_;
    bool hermitian_ = false;
};

ComplexSparseMatrix operator+(const ComplexSparseMatrix& a, const ComplexSparseMatrix& b);
ComplexSparseMatrix operator*(Complex s, const ComplexSparseMatrix& a);

// Matrix product; the Hermitian flag of the result is not asserted.
ComplexSparseMatrix product(const ComplexSparseMatrix& a, const ComplexSparseMatrix& b);
ComplexSparseMatrix adjoint(const ComplexSparseMatrix& a);
ComplexSparseMatrix kron(const ComplexSparseMatrix& a, const ComplexSparseMatrix& b);
// Max entry of |AB - BA|.
double commutator_max(const ComplexSparseMatrix& a, const ComplexSparseMatrix& b);

// Connected components of the symmetrised sparsity graph; each component is a
// sorted index list and components are ordered by their smallest index.
std::vector<std::vector<Index>> connected_components(const SparseStorage& m);
std::vector<std::vector<Index>> connected_components(std::span<const SparseStorage* const> ms,
                                                     Index dim);

// Exact eigendecomposition of a Hermitian matrix, held per invariant block.
class SpectralDecomposition {
public:
    struct Block {
        std::vector<Index> support;  // global indices spanned by the block
        RVector values;              // ascending
        CMatrix vectors;             // |support| x |support|, column per eigenvalue
    };

    // Requires the Hermitian flag. Throws SizeLimitError if a component exceeds
    // tol.dense_limit.
    static SpectralDecomposition compute(const ComplexSparseMatrix& m,
                                         const Tolerances& tol = default_tolerances());

    Index dim() const noexcept { return dim_; }
    const std::vector<Block>& blocks() const noexcept { return blocks_; }

    // Eigenvalues in "eigen-coordinate" order: the blocks concatenated.
    const RVector& block_values() const noexcept { return block_values_; }
    // All eigenvalues ascending.
    RVector eigenvalues() const;
    // Dense unitary, columns ordered as eigenvalues(). Only for modest dims.
    CMatrix eigenvectors() const;

    // W^dagger v and W c, with W the (block) eigenvector matrix in block order.
    CVector to_eigen(const CVector& v) const;
    CVector from_eigen(const CVector& c) const;

    // f(M) v via the functional calculus.
    CVector apply(const std::function<Complex(double)>& f, const CVector& v) const;
    // f(M) as a sparse matrix with the block structure of M.
    ComplexSparseMatrix function(const std::function<Complex(double)>& f, bool hermitian) const;

    double min_eigenvalue() const;
    double max_eigenvalue() const;

    // Distinct eigenvalues (grouped within tol.level_grouping), ascending.
    std::vector<double> levels(double grouping = default_tolerances().level_grouping) const;

private:
    Index dim_ = 0;
    std::vector<Block> blocks_;
    std::vector<Index> offsets_;
    RVector block_values_;
};

// Dense e^{-itM}. Throws NotHermitianError (carrying the max asymmetry) when the
// Hermitian flag is missing or wrong.
CMatrix matexp(const ComplexSparseMatrix& m, double t,
               const Tolerances& tol = default_tolerances());
CMatrix matexp(const SpectralDecomposition& d, double t);
// e^{-itM} v without forming the matrix.
CVector evolve(const SpectralDecomposition& d, double t, const CVector& v);

struct SpectralProjection {
    ComplexSparseMatrix matrix;
    Index rank = 0;
    // Set when an interval end lies within tol.boundary_tie of an eigenvalue;
    // such eigenvalues are included (closed interval).
    bool boundary_tie = false;
};

SpectralProjection spectral_projection(const ComplexSparseMatrix& m, double lo, double hi,
                                       const Tolerances& tol = default_tolerances());
SpectralProjection spectral_projection(const SpectralDecomposition& d, double lo, double hi,
                                       const Tolerances& tol = default_tolerances());

// Coordinate exchange format: header `dim nnz hermitian`, then `row col re im`
// per entry with 0-based indices, row-major order.
void write_matrix(std::ostream& out, const ComplexSparseMatrix& m);
void write_matrix(const std::string& path, const ComplexSparseMatrix& m);
ComplexSparseMatrix read_matrix(std::istream& in, const Tolerances& tol = default_tolerances());
ComplexSparseMatrix read_matrix(const std::string& path,
                                const Tolerances& tol = default_tolerances());

}  // namespace fockdyson::numerics
