// fock.hpp: truncated bosonic Fock space over a finite one-particle space
//
// Modes are labelled (grid point, component) and flattened as
// mode = grid_index * components + component. A FockBasis holds every
// occupation vector with total number <= n_max, graded by total number and
// ascending-lexicographic inside each number sector, so the number bands are
// contiguous index ranges.
//
// a(F) is antilinear in F: a(F) = sum_i conj(F_i) a_i, a(F)^dagger = sum_i F_i a_i^dagger.
// Creator matrix elements that would leave the basis are dropped, which keeps
// the creator equal to the adjoint of the annihilator on the retained space.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "fockdyson/numerics.hpp"

namespace fockdyson::fock {

using Vec3 = Eigen::Vector3d;
using numerics::ComplexSparseMatrix;

class OnePhotonSpace {
public:
    // Transverse photons: two polarisations per grid point. Rejects points on
    // the k3 axis and duplicated points.
    static OnePhotonSpace photons(std::vector<Vec3> grid);
    // Neutral scalar bosons: one component per grid point, k = 0 still rejected
    // by the coupling functions, not here.
    static OnePhotonSpace scalar(std::vector<Vec3> grid);
    // Abstract modes with no momentum label (toy models).
    static OnePhotonSpace modes(Index count);

    Index dim() const noexcept { return dim_; }
    Index components() const noexcept { return components_; }
    const std::vector<Vec3>& grid() const noexcept { return grid_; }
    Index mode(Index grid_index, Index component) const { return grid_index * components_ + component; }

private:
    std::vector<Vec3> grid_;
    Index components_ = 1;
    Index dim_ = 0;
};

// Amplitude per mode of a one-particle vector.
class PhotonVector {
public:
    PhotonVector() = default;
    explicit PhotonVector(CVector components);

    const CVector& components() const noexcept { return components_; }
    Index size() const noexcept { return components_.size(); }
    double norm() const { return components_.norm(); }

private:
    CVector components_;
};

using Occupation = std::uint16_t;

class FockBasis {
public:
    static constexpr Index kDefaultSizeLimit = 2'000'000;

    // |basis| = C(n_max + dim_h, dim_h); throws SizeLimitError above `size_limit`.
    static FockBasis build(const OnePhotonSpace& space, int n_max,
                           Index size_limit = kDefaultSizeLimit);
    static FockBasis build(Index dim_h, int n_max, Index size_limit = kDefaultSizeLimit);

    // sum_{n=0}^{n_max} C(n + d - 1, d - 1), in floating point so oversize
    // requests can be reported without overflow.
    static double size_estimate(Index dim_h, int n_max);

    Index size() const noexcept { return count_; }
    Index modes() const noexcept { return dim_h_; }
    int n_max() const noexcept { return n_max_; }

    // Occupation numbers of basis state i.
    std::span<const Occupation> state(Index i) const {
        return {occupations_.data() + i * dim_h_, static_cast<std::size_t>(dim_h_)};
    }
    int total(Index i) const { return totals_[static_cast<std::size_t>(i)]; }
    // Inverse of state(); -1 if the occupation is not in the basis.
    Index lookup(std::span<const Occupation> occupation) const;

    // First index of the total-number-n sector; band_begin(n_max + 1) == size().
    Index band_begin(int n) const { return band_offsets_[static_cast<std::size_t>(n)]; }

    // Text dump, one line per state: `index : (n1,...,nd)`.
    void dump(std::ostream& out) const;

private:
    Index dim_h_ = 0;
    int n_max_ = 0;
    Index count_ = 0;
    std::vector<Occupation> occupations_;
    std::vector<int> totals_;
    std::vector<Index> band_offsets_;
    // binom_[r][p] = C(r + p - 1, p - 1): compositions of r into p parts.
    std::vector<std::vector<Index>> compositions_;
};

ComplexSparseMatrix annihilator(const FockBasis& basis, const PhotonVector& f);
ComplexSparseMatrix creator(const FockBasis& basis, const PhotonVector& f);
// phi(F) = (a(F) + a(F)^dagger) / sqrt(2), Hermitian by construction.
ComplexSparseMatrix segal_field(const FockBasis& basis, const PhotonVector& f);
// dGamma(h) = sum_ij h_ij a_i^dagger a_j for a Hermitian dim_h x dim_h matrix h.
ComplexSparseMatrix second_quantize(const FockBasis& basis, const CMatrix& h);
// dGamma(diag(omega)), the common case of a multiplication operator.
ComplexSparseMatrix second_quantize_diagonal(const FockBasis& basis, const RVector& omega);
ComplexSparseMatrix number_operator(const FockBasis& basis);

}  // namespace fockdyson::fock
