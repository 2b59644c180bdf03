#include "fockdyson/fock.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace fockdyson::fock {

namespace {

void check_length(const FockBasis& basis, const PhotonVector& f) {
    if (f.size() != basis.modes()) {
        std::ostringstream msg;
        msg << "one-particle vector has " << f.size() << " components, basis has " << basis.modes()
            << " modes";
        throw DimensionError(msg.str());
    }
}

// Appends the annihilator entries conj(F_i) sqrt(n_i) at (s - e_i, s), scaled.
void annihilator_entries(const FockBasis& basis, const PhotonVector& f, double scale,
                         std::vector<Triplet>& out) {
    const CVector& amp = f.components();
    const Index d = basis.modes();
    std::vector<Occupation> target(static_cast<std::size_t>(d));
    for (Index col = 0; col < basis.size(); ++col) {
        if (basis.total(col) == 0) continue;
        const auto s = basis.state(col);
        std::copy(s.begin(), s.end(), target.begin());
        for (Index i = 0; i < d; ++i) {
            if (s[i] == 0 || amp[i] == Complex(0.0)) continue;
            target[i] = static_cast<Occupation>(s[i] - 1);
            const Index row = basis.lookup(target);
            target[i] = s[i];
            out.emplace_back(row, col, scale * std::conj(amp[i]) * std::sqrt(double(s[i])));
        }
    }
}

// Appends the creator entries F_i sqrt(n_i + 1) at (s + e_i, s), dropping
// anything beyond n_max.
void creator_entries(const FockBasis& basis, const PhotonVector& f, double scale,
                     std::vector<Triplet>& out) {
    const CVector& amp = f.components();
    const Index d = basis.modes();
    std::vector<Occupation> target(static_cast<std::size_t>(d));
    const Index last = basis.band_begin(basis.n_max());
    for (Index col = 0; col < last; ++col) {
        const auto s = basis.state(col);
        std::copy(s.begin(), s.end(), target.begin());
        for (Index i = 0; i < d; ++i) {
            if (amp[i] == Complex(0.0)) continue;
            target[i] = static_cast<Occupation>(s[i] + 1);
            const Index row = basis.lookup(target);
            target[i] = s[i];
            out.emplace_back(row, col, scale * amp[i] * std::sqrt(double(s[i]) + 1.0));
        }
    }
}

}  // namespace

OnePhotonSpace OnePhotonSpace::photons(std::vector<Vec3> grid) {
    std::set<std::tuple<double, double, double>> seen;
    for (const Vec3& k : grid) {
        if (k[0] == 0.0 && k[1] == 0.0) {
            std::ostringstream msg;
            msg << "photon momentum (" << k.transpose() << ") lies on the k3 axis";
            throw Error(msg.str());
        }
        if (!seen.emplace(k[0], k[1], k[2]).second) throw Error("photon momentum grid has duplicates");
    }
    OnePhotonSpace s;
    s.components_ = 2;
    s.dim_ = 2 * static_cast<Index>(grid.size());
    s.grid_ = std::move(grid);
    return s;
}

OnePhotonSpace OnePhotonSpace::scalar(std::vector<Vec3> grid) {
    std::set<std::tuple<double, double, double>> seen;
    for (const Vec3& k : grid)
        if (!seen.emplace(k[0], k[1], k[2]).second) throw Error("momentum grid has duplicates");
    OnePhotonSpace s;
    s.components_ = 1;
    s.dim_ = static_cast<Index>(grid.size());
    s.grid_ = std::move(grid);
    return s;
}

OnePhotonSpace OnePhotonSpace::modes(Index count) {
    if (count < 1) throw Error("one-particle space needs at least one mode");
    OnePhotonSpace s;
    s.components_ = 1;
    s.dim_ = count;
    return s;
}

PhotonVector::PhotonVector(CVector components) : components_(std::move(components)) {
    if (!components_.allFinite()) throw Error("one-particle vector has non-finite entries");
}

// ---------------------------------------------------------------------------
// FockBasis

double FockBasis::size_estimate(Index dim_h, int n_max) {
    // C(n_max + d, d) by the multiplicative formula.
    double c = 1.0;
    for (int k = 1; k <= n_max; ++k) c = c * double(dim_h + k) / double(k);
    return c;
}

FockBasis FockBasis::build(const OnePhotonSpace& space, int n_max, Index size_limit) {
    return build(space.dim(), n_max, size_limit);
}

FockBasis FockBasis::build(Index dim_h, int n_max, Index size_limit) {
    if (n_max < 0) throw Error("n_max must be non-negative");
    if (dim_h < 1) throw DimensionError("one-particle space must have at least one mode");
    if (n_max > std::numeric_limits<Occupation>::max() - 1) throw Error("n_max too large");
    const double estimate = size_estimate(dim_h, n_max);
    if (estimate > double(size_limit)) {
        std::ostringstream msg;
        msg << "Fock basis with " << dim_h << " modes and n_max = " << n_max << " would have about "
            << estimate << " states, above the limit " << size_limit;
        throw SizeLimitError(msg.str(), estimate);
    }

    FockBasis b;
    b.dim_h_ = dim_h;
    b.n_max_ = n_max;
    b.count_ = static_cast<Index>(std::llround(estimate));

    // compositions_[r][p] for r <= n_max, p <= dim_h.
    b.compositions_.assign(static_cast<std::size_t>(n_max + 1),
                           std::vector<Index>(static_cast<std::size_t>(dim_h + 1), 0));
    for (int r = 0; r <= n_max; ++r) {
        b.compositions_[r][0] = (r == 0) ? 1 : 0;
        for (Index p = 1; p <= dim_h; ++p) {
            // C(r + p - 1, p - 1) = sum_{v=0}^{r} C(r - v + p - 2, p - 2)
            Index sum = 0;
            for (int v = 0; v <= r; ++v) sum += b.compositions_[r - v][p - 1];
            b.compositions_[r][p] = sum;
        }
    }

    b.occupations_.reserve(static_cast<std::size_t>(b.count_ * dim_h));
    b.totals_.reserve(static_cast<std::size_t>(b.count_));
    b.band_offsets_.reserve(static_cast<std::size_t>(n_max + 2));

    std::vector<Occupation> cur(static_cast<std::size_t>(dim_h), 0);
    for (int n = 0; n <= n_max; ++n) {
        b.band_offsets_.push_back(static_cast<Index>(b.totals_.size()));
        // Ascending lexicographic compositions of n: start at (0,...,0,n).
        std::fill(cur.begin(), cur.end(), 0);
        cur.back() = static_cast<Occupation>(n);
        while (true) {
            b.occupations_.insert(b.occupations_.end(), cur.begin(), cur.end());
            b.totals_.push_back(n);
            // Next composition: find the rightmost position i < d-1 that can be
            // incremented, i.e. with some mass to its right.
            Index i = dim_h - 2;
            int tail = cur.back();
            while (i >= 0 && tail == 0) {
                tail += cur[i];
                --i;
            }
            if (i < 0) break;
            // cur[i+1..] holds `tail` photons; move one to position i and
            // reset the remainder to (0,...,0,tail-1).
            ++cur[i];
            for (Index j = i + 1; j < dim_h; ++j) cur[j] = 0;
            cur.back() = static_cast<Occupation>(tail - 1);
        }
    }
    b.band_offsets_.push_back(static_cast<Index>(b.totals_.size()));
    if (static_cast<Index>(b.totals_.size()) != b.count_)
        throw Error("internal: Fock basis enumeration count mismatch");
    return b;
}

Index FockBasis::lookup(std::span<const Occupation> occupation) const {
    if (static_cast<Index>(occupation.size()) != dim_h_) return -1;
    int n = 0;
    for (Occupation o : occupation) n += o;
    if (n > n_max_) return -1;
    // Rank among ascending-lexicographic compositions of n into dim_h parts.
    Index rank = 0;
    int remaining = n;
    for (Index i = 0; i + 1 < dim_h_; ++i) {
        const Index parts_after = dim_h_ - i - 1;
        for (int v = 0; v < occupation[i]; ++v) rank += compositions_[remaining - v][parts_after];
        remaining -= occupation[i];
    }
    return band_offsets_[static_cast<std::size_t>(n)] + rank;
}

void FockBasis::dump(std::ostream& out) const {
    for (Index i = 0; i < count_; ++i) {
        out << i << " : (";
        const auto s = state(i);
        for (Index m = 0; m < dim_h_; ++m) out << (m ? "," : "") << s[m];
        out << ")\n";
    }
}

// ---------------------------------------------------------------------------
// Operators

ComplexSparseMatrix annihilator(const FockBasis& basis, const PhotonVector& f) {
    check_length(basis, f);
    std::vector<Triplet> t;
    annihilator_entries(basis, f, 1.0, t);
    return ComplexSparseMatrix::from_triplets(basis.size(), t, false);
}

ComplexSparseMatrix creator(const FockBasis& basis, const PhotonVector& f) {
    check_length(basis, f);
    std::vector<Triplet> t;
    creator_entries(basis, f, 1.0, t);
    return ComplexSparseMatrix::from_triplets(basis.size(), t, false);
}

ComplexSparseMatrix segal_field(const FockBasis& basis, const PhotonVector& f) {
    check_length(basis, f);
    const double s = 1.0 / std::sqrt(2.0);
    std::vector<Triplet> t;
    annihilator_entries(basis, f, s, t);
    creator_entries(basis, f, s, t);
    return ComplexSparseMatrix::from_triplets(basis.size(), t, true);
}

ComplexSparseMatrix second_quantize(const FockBasis& basis, const CMatrix& h) {
    const Index d = basis.modes();
    if (h.rows() != d || h.cols() != d)
        throw DimensionError("one-particle operator must be " + std::to_string(d) + "x" +
                             std::to_string(d));
    const double defect = numerics::hermitian_defect(h);
    if (defect > numerics::default_tolerances().hermitian)
        throw NotHermitianError("second_quantize: one-particle operator is not Hermitian", defect);

    std::vector<Triplet> t;
    std::vector<Occupation> target(static_cast<std::size_t>(d));
    for (Index col = 0; col < basis.size(); ++col) {
        const auto s = basis.state(col);
        Complex diag = 0.0;
        for (Index i = 0; i < d; ++i) diag += h(i, i) * double(s[i]);
        if (diag != Complex(0.0)) t.emplace_back(col, col, Complex(diag.real(), 0.0));
        std::copy(s.begin(), s.end(), target.begin());
        for (Index j = 0; j < d; ++j) {
            if (s[j] == 0) continue;
            for (Index i = 0; i < d; ++i) {
                if (i == j || h(i, j) == Complex(0.0)) continue;
                // a_i^dagger a_j |s> = sqrt(n_j (n_i + 1)) |s - e_j + e_i>
                --target[j];
                ++target[i];
                const Index row = basis.lookup(target);
                ++target[j];
                --target[i];
                t.emplace_back(row, col, h(i, j) * std::sqrt(double(s[j]) * (double(s[i]) + 1.0)));
            }
        }
    }
    return ComplexSparseMatrix::from_triplets(basis.size(), t, true);
}

ComplexSparseMatrix second_quantize_diagonal(const FockBasis& basis, const RVector& omega) {
    const Index d = basis.modes();
    if (omega.size() != d) throw DimensionError("second_quantize_diagonal: length mismatch");
    RVector diag(basis.size());
    for (Index col = 0; col < basis.size(); ++col) {
        const auto s = basis.state(col);
        double e = 0.0;
        for (Index i = 0; i < d; ++i) e += omega[i] * double(s[i]);
        diag[col] = e;
    }
    return ComplexSparseMatrix::diagonal(diag);
}

ComplexSparseMatrix number_operator(const FockBasis& basis) {
    RVector diag(basis.size());
    for (Index i = 0; i < basis.size(); ++i) diag[i] = double(basis.total(i));
    return ComplexSparseMatrix::diagonal(diag);
}

}  // namespace fockdyson::fock
