// field.hpp: coupling the Dirac particle to a quantised boson field
//
// Photon modes live on the half-offset dual grid of the Dirac lattice, with
// quadrature weight sqrt(cell volume) folded into every one-particle amplitude
// so that one-particle norms approximate the continuum L^2 norms.

#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "fockdyson/bundle.hpp"
#include "fockdyson/dirac.hpp"
#include "fockdyson/fock.hpp"

namespace fockdyson::field {

using Vec3 = Eigen::Vector3d;

// e1(k) proportional to (-k2, k1, 0), e2(k) = khat x e1(k).
struct Polarization {
    std::vector<Vec3> grid;
    std::vector<Vec3> e1;
    std::vector<Vec3> e2;
    const Vec3& e(int r, Index k) const { return r == 0 ? e1[k] : e2[k]; }
};

Polarization polarization_vectors(const std::vector<Vec3>& grid);

enum class CutoffProfile { gaussian, sharp };

struct Cutoff {
    CutoffProfile profile = CutoffProfile::gaussian;
    double width = 0.0;            // sigma (gaussian) or k_max (sharp)
    std::vector<double> chi_hat;   // per grid point, real
};

// chi_hat(k) = exp(-|k|^2 / (2 sigma^2)).
Cutoff gaussian_cutoff(const std::vector<Vec3>& grid, double sigma);
// chi_hat(k) = 1 for |k| <= k_max, else 0.
Cutoff sharp_cutoff(const std::vector<Vec3>& grid, double k_max);
// Gaussian whose value at the largest |k| of the grid is just below 1e-6.
double default_sigma(const std::vector<Vec3>& grid);

// g^j_x(k, r) = sqrt(dV) chi_hat(k) e^j_(r)(k) exp(-i k.x) / sqrt(|k|), j in {0,1,2}.
fock::PhotonVector coupling_function(const Vec3& x, int j, const Polarization& pol,
                                     const Cutoff& cutoff, double cell_volume);
// chi_x(k) = sqrt(dV) chi_hat(k) exp(-i k.x) / sqrt(|k|), for the scalar field.
fock::PhotonVector scalar_coupling(const Vec3& x, const std::vector<Vec3>& grid,
                                   const Cutoff& cutoff, double cell_volume);

// A^j(x) = phi(g^j_x).
numerics::ComplexSparseMatrix quantized_field(const Vec3& x, int j, const fock::FockBasis& basis,
                                              const Polarization& pol, const Cutoff& cutoff,
                                              double cell_volume);

// C^{4 sites} (x) Fock space; index = dirac_index * |Fock| + fock_index.
class CoupledSpace {
public:
    CoupledSpace(Index dirac_dim, std::shared_ptr<const fock::FockBasis> basis);

    Index dirac_dim() const noexcept { return dirac_dim_; }
    const fock::FockBasis& fock() const noexcept { return *basis_; }
    Index dim() const noexcept { return dirac_dim_ * basis_->size(); }
    Index index(Index dirac, Index fock) const { return dirac * basis_->size() + fock; }
    std::pair<Index, Index> split(Index i) const { return {i / basis_->size(), i % basis_->size()}; }

private:
    Index dirac_dim_;
    std::shared_ptr<const fock::FockBasis> basis_;
};

// H1 = -q sum_j alpha^j (x) A^j, A^j block-diagonal over lattice sites.
numerics::ComplexSparseMatrix interaction(const CoupledSpace& coupled,
                                          const dirac::PositionLattice& lattice, double q,
                                          const Polarization& pol, const Cutoff& cutoff,
                                          const dirac::GammaSet& g = dirac::gamma_set());

// sum_j ||alpha^j|| ||g_0^j||.
double coupling_norm_sum(const Polarization& pol, const Cutoff& cutoff, double cell_volume,
                         const dirac::GammaSet& g = dirac::gamma_set());

struct CutoffSpec {
    CutoffProfile profile = CutoffProfile::gaussian;
    std::optional<double> width;  // default_sigma() when absent (gaussian only)
};

struct DiracMaxwellParams {
    int points_per_axis = 1;
    double spacing = 1.0;
    double mass = 1.0;
    double charge = 0.0;           // q in H1 = -q alpha.A
    dirac::PotentialSpec potential;  // empty values => zero potential
    CutoffSpec cutoff;
    int n_max = 2;
    Index fock_size_limit = fock::FockBasis::kDefaultSizeLimit;
};

// The assembled model with its sector pieces, kept for diagnostics.
struct DiracMaxwellModel {
    dirac::PositionLattice lattice;
    Polarization polarization;
    Cutoff cutoff;
    std::shared_ptr<const fock::FockBasis> basis;
    numerics::ComplexSparseMatrix h_dirac;
    numerics::ComplexSparseMatrix h_rad;
    ModelBundle bundle;
};

// H0 = H_D(V) (x) 1 + 1 (x) dGamma(omega), H1 as above, A = 1 (x) N_b.
DiracMaxwellModel total_hamiltonian(const DiracMaxwellParams& params);

struct DiracKleinGordonParams {
    int points_per_axis = 1;
    double spacing = 1.0;
    double mass = 1.0;
    double coupling = 0.0;  // lambda
    dirac::PotentialSpec potential;
    CutoffSpec cutoff;
    int n_max = 2;
    Index fock_size_limit = fock::FockBasis::kDefaultSizeLimit;
};

struct DiracKleinGordonModel {
    dirac::PositionLattice lattice;
    Cutoff cutoff;
    std::shared_ptr<const fock::FockBasis> basis;
    numerics::ComplexSparseMatrix h_dirac;
    numerics::ComplexSparseMatrix h_field;
    ModelBundle bundle;
};

// H_DKG = H_D(V) (x) 1 + 1 (x) dGamma(omega) + lambda sum_x |x><x| beta (x) phi(chi_x).
DiracKleinGordonModel dkg_hamiltonian(const DiracKleinGordonParams& params);

// Single boson mode: H0 = omega a^dagger a, H1 = lambda phi(1), A = a^dagger a.
ModelBundle single_mode_toy(double omega, double lambda, int n_max);

}  // namespace fockdyson::field
