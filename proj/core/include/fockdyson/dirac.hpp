// dirac.hpp: lattice Dirac sector
//
// Gamma matrices in the Dirac representation, the periodic half-offset
// position lattice, potentials (zero, Coulomb, tabulated), the discretised
// Dirac operator H_D(V) = alpha.p + M beta + V, and the charge-parity
// conjugation matrix U with its invariance check.
//
// Dirac-space index ordering is 4 * site + spinor component.

#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fockdyson/numerics.hpp"

namespace fockdyson::dirac {

using numerics::ComplexSparseMatrix;
using Matrix4 = Eigen::Matrix4cd;
using Vec3 = Eigen::Vector3d;

// 4x4 matrix over the Gaussian integers Z[i], for exact algebra checks.
class ExactMatrix4 {
public:
    using Entry = std::complex<long long>;

    ExactMatrix4() { for (auto& row : m_) row.fill(Entry(0, 0)); }
    static ExactMatrix4 identity();

    Entry& operator()(int r, int c) { return m_[r][c]; }
    const Entry& operator()(int r, int c) const { return m_[r][c]; }

    ExactMatrix4 operator+(const ExactMatrix4& o) const;
    ExactMatrix4 operator-(const ExactMatrix4& o) const;
    ExactMatrix4 operator*(const ExactMatrix4& o) const;
    ExactMatrix4 scaled(Entry s) const;
    ExactMatrix4 conj() const;
    ExactMatrix4 adjoint() const;
    bool operator==(const ExactMatrix4& o) const { return m_ == o.m_; }

    Matrix4 to_complex() const;

private:
    std::array<std::array<Entry, 4>, 4> m_;
};

ExactMatrix4 anticommutator(const ExactMatrix4& a, const ExactMatrix4& b);

enum class Representation { dirac };

struct GammaSet {
    std::array<ExactMatrix4, 4> gamma;  // gamma^0 .. gamma^3
    std::array<ExactMatrix4, 3> alpha;  // alpha^j = gamma^0 gamma^j
    ExactMatrix4 beta;                  // gamma^0
    static constexpr std::array<int, 4> metric{1, -1, -1, -1};

    Matrix4 alpha_c(int j) const { return alpha[j].to_complex(); }
    Matrix4 beta_c() const { return beta.to_complex(); }

    // Each invariant checked in exact integer arithmetic; names the first
    // violated relation, empty if all hold.
    std::string first_violation() const;
};

GammaSet gamma_set(Representation rep = Representation::dirac);

// Real 4x4 matrix U with U^2 = 1, UC = CU, U^-1 alpha^j U = conj(alpha^j) and
// U^-1 beta U = -conj(beta).
struct ConjugationData {
    ExactMatrix4 u;
    std::string first_violation(const GammaSet& g) const;
};

// Found by exhaustive search over the 384 signed permutation matrices; the
// first match in (permutation lexicographic, sign pattern binary) order.
ConjugationData pauli_matrix(const GammaSet& g);

// Periodic cubic lattice with sites at a (n + 1/2), n = -(L-1)/2 .. (L-1)/2 per
// axis. The reflection x -> -x maps sites to sites modulo the period.
class PositionLattice {
public:
    PositionLattice(int points_per_axis, double spacing);

    int points_per_axis() const noexcept { return points_; }
    double spacing() const noexcept { return spacing_; }
    double period() const noexcept { return spacing_ * points_; }
    Index sites() const noexcept { return static_cast<Index>(points_) * points_ * points_; }

    // Site coordinate and its minimum-image representative.
    Vec3 position(Index site) const;
    Vec3 minimum_image(Index site) const;
    Index mirror(Index site) const;
    std::array<int, 3> axis_indices(Index site) const;

    // Dirac momenta 2 pi m / (L a), m = -(L-1)/2 .. (L-1)/2 (includes p = 0).
    std::vector<double> axis_momenta() const;
    // Photon momenta with a half-cell offset, 2 pi (m + 1/2) / (L a); never zero.
    std::vector<Vec3> photon_momenta() const;
    double momentum_cell_volume() const;

private:
    int points_;
    double spacing_;
};

enum class PotentialKind { zero, coulomb, table };

struct PotentialSpec {
    PotentialKind kind = PotentialKind::zero;
    std::vector<Matrix4> values;  // one Hermitian matrix per site
    double z = 0.0;
    double q = 0.0;
};

PotentialSpec zero_potential(const PositionLattice& lattice);
// V(x) = -Z q^2 / |x| times the identity. Throws ThresholdError unless Z q^2 < 1/2.
PotentialSpec coulomb_values(const PositionLattice& lattice, double z, double q);
// Tabulated per-site matrices; each must be Hermitian.
PotentialSpec table_potential(std::vector<Matrix4> values);
// Reads a block-diagonal 4N x 4N matrix in the numerics coordinate format.
PotentialSpec read_potential(const std::string& path, const PositionLattice& lattice);

// Throws ThresholdError when Z q^2 >= 1/2.
void check_coulomb_gate(double z, double q);

ComplexSparseMatrix dirac_hamiltonian(const PositionLattice& lattice, double mass,
                                      const PotentialSpec& v, const GammaSet& g = gamma_set());

struct CpCheck {
    bool invariant = false;
    double defect = 0.0;
};

// defect = max_x || U^-1 V(x) U - conj(V(-x)) || (spectral norm).
CpCheck cp_invariant(const PositionLattice& lattice, const PotentialSpec& v,
                     const ConjugationData& c,
                     const numerics::Tolerances& tol = numerics::default_tolerances());

}  // namespace fockdyson::dirac
