#include "fockdyson/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fockdyson::field {

namespace {

using numerics::ComplexSparseMatrix;

double operator_norm(const dirac::Matrix4& m) {
    Eigen::JacobiSVD<dirac::Matrix4> svd(m);
    return svd.singularValues()[0];
}

Cutoff make_cutoff(const std::vector<Vec3>& grid, const CutoffSpec& spec) {
    if (spec.profile == CutoffProfile::sharp) {
        if (!spec.width) throw Error("sharp cutoff requires k_max");
        return sharp_cutoff(grid, *spec.width);
    }
    return gaussian_cutoff(grid, spec.width.value_or(default_sigma(grid)));
}

std::string profile_name(CutoffProfile p) { return p == CutoffProfile::sharp ? "sharp" : "gaussian"; }

std::string potential_name(dirac::PotentialKind k) {
    switch (k) {
        case dirac::PotentialKind::coulomb: return "coulomb";
        case dirac::PotentialKind::table: return "table";
        default: return "zero";
    }
}

void check_grid(const std::vector<Vec3>& grid, const Cutoff& cutoff) {
    if (cutoff.chi_hat.size() != grid.size())
        throw DimensionError("cutoff and momentum grid have different sizes");
    for (const Vec3& k : grid)
        if (k.norm() == 0.0) throw Error("momentum grid contains k = 0, where 1/sqrt(omega) is singular");
}

}  // namespace

Polarization polarization_vectors(const std::vector<Vec3>& grid) {
    Polarization pol;
    pol.grid = grid;
    pol.e1.reserve(grid.size());
    pol.e2.reserve(grid.size());
    for (const Vec3& k : grid) {
        const double rho = std::hypot(k[0], k[1]);
        if (rho == 0.0) {
            std::ostringstream msg;
            msg << "polarization undefined on the k3 axis, k = (" << k.transpose() << ")";
            throw Error(msg.str());
        }
        const Vec3 e1(-k[1] / rho, k[0] / rho, 0.0);
        pol.e1.push_back(e1);
        pol.e2.push_back(k.normalized().cross(e1));
    }
    return pol;
}

Cutoff gaussian_cutoff(const std::vector<Vec3>& grid, double sigma) {
    if (!(sigma > 0.0)) throw Error("gaussian cutoff width must be positive");
    Cutoff c;
    c.profile = CutoffProfile::gaussian;
    c.width = sigma;
    for (const Vec3& k : grid) c.chi_hat.push_back(std::exp(-k.squaredNorm() / (2.0 * sigma * sigma)));
    return c;
}

Cutoff sharp_cutoff(const std::vector<Vec3>& grid, double k_max) {
    if (!(k_max > 0.0)) throw Error("sharp cutoff k_max must be positive");
    Cutoff c;
    c.profile = CutoffProfile::sharp;
    c.width = k_max;
    for (const Vec3& k : grid) c.chi_hat.push_back(k.norm() <= k_max ? 1.0 : 0.0);
    return c;
}

double default_sigma(const std::vector<Vec3>& grid) {
    double edge = 0.0;
    for (const Vec3& k : grid) edge = std::max(edge, k.norm());
    if (edge == 0.0) throw Error("cannot size a cutoff on an empty grid");
    return 0.999 * edge / std::sqrt(2.0 * std::log(1e6));
}

fock::PhotonVector coupling_function(const Vec3& x, int j, const Polarization& pol,
                                     const Cutoff& cutoff, double cell_volume) {
    if (j < 0 || j > 2) throw Error("field component index must be 0, 1 or 2");
    check_grid(pol.grid, cutoff);
    const double w = std::sqrt(cell_volume);
    const Index n = static_cast<Index>(pol.grid.size());
    CVector g(2 * n);
    for (Index i = 0; i < n; ++i) {
        const Vec3& k = pol.grid[i];
        const Complex phase = std::polar(1.0, -k.dot(x));
        const double amp = w * cutoff.chi_hat[i] / std::sqrt(k.norm());
        for (int r = 0; r < 2; ++r) g[2 * i + r] = amp * pol.e(r, i)[j] * phase;
    }
    return fock::PhotonVector(std::move(g));
}

fock::PhotonVector scalar_coupling(const Vec3& x, const std::vector<Vec3>& grid, const Cutoff& cutoff,
                                   double cell_volume) {
    check_grid(grid, cutoff);
    const double w = std::sqrt(cell_volume);
    CVector g(static_cast<Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i)
        g[i] = w * cutoff.chi_hat[i] / std::sqrt(grid[i].norm()) * std::polar(1.0, -grid[i].dot(x));
    return fock::PhotonVector(std::move(g));
}

ComplexSparseMatrix quantized_field(const Vec3& x, int j, const fock::FockBasis& basis,
                                    const Polarization& pol, const Cutoff& cutoff, double cell_volume) {
    return fock::segal_field(basis, coupling_function(x, j, pol, cutoff, cell_volume));
}

CoupledSpace::CoupledSpace(Index dirac_dim, std::shared_ptr<const fock::FockBasis> basis)
    : dirac_dim_(dirac_dim), basis_(std::move(basis)) {
    if (!basis_) throw Error("coupled space needs a Fock basis");
    if (dirac_dim_ < 1) throw DimensionError("Dirac dimension must be positive");
}

ComplexSparseMatrix interaction(const CoupledSpace& coupled, const dirac::PositionLattice& lattice,
                                double q, const Polarization& pol, const Cutoff& cutoff,
                                const dirac::GammaSet& g) {
    if (coupled.dirac_dim() != 4 * lattice.sites())
        throw DimensionError("coupled space Dirac dimension does not match the lattice");
    if (coupled.fock().modes() != 2 * static_cast<Index>(pol.grid.size()))
        throw DimensionError("Fock basis modes do not match the polarised momentum grid");
    if (q == 0.0) return ComplexSparseMatrix::zero(coupled.dim());

    const double dv = lattice.momentum_cell_volume();
    std::array<dirac::Matrix4, 3> alpha{g.alpha_c(0), g.alpha_c(1), g.alpha_c(2)};
    std::vector<Triplet> t;
    for (Index site = 0; site < lattice.sites(); ++site) {
        const Vec3 x = lattice.position(site);
        for (int j = 0; j < 3; ++j) {
            const ComplexSparseMatrix a_j = quantized_field(x, j, coupled.fock(), pol, cutoff, dv);
            const SparseStorage& s = a_j.storage();
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) {
                    const Complex coeff = -q * alpha[j](r, c);
                    if (coeff == Complex(0.0)) continue;
                    for (Index k = 0; k < s.outerSize(); ++k)
                        for (SparseStorage::InnerIterator it(s, k); it; ++it)
                            t.emplace_back(coupled.index(4 * site + r, it.row()),
                                           coupled.index(4 * site + c, it.col()), coeff * it.value());
                }
        }
    }
    return ComplexSparseMatrix::from_triplets(coupled.dim(), t, true);
}

double coupling_norm_sum(const Polarization& pol, const Cutoff& cutoff, double cell_volume,
                         const dirac::GammaSet& g) {
    double sum = 0.0;
    for (int j = 0; j < 3; ++j)
        sum += operator_norm(g.alpha_c(j)) * coupling_function(Vec3::Zero(), j, pol, cutoff, cell_volume).norm();
    return sum;
}

DiracMaxwellModel total_hamiltonian(const DiracMaxwellParams& p) {
    dirac::PositionLattice lattice(p.points_per_axis, p.spacing);
    const auto gammas = dirac::gamma_set();
    const dirac::PotentialSpec potential =
        p.potential.values.empty() ? dirac::zero_potential(lattice) : p.potential;

    const auto grid = lattice.photon_momenta();
    auto space = fock::OnePhotonSpace::photons(grid);
    Polarization pol = polarization_vectors(grid);
    Cutoff cutoff = make_cutoff(grid, p.cutoff);
    auto basis = std::make_shared<const fock::FockBasis>(fock::FockBasis::build(space, p.n_max, p.fock_size_limit));

    ComplexSparseMatrix h_dirac = dirac::dirac_hamiltonian(lattice, p.mass, potential, gammas);
    RVector omega(space.dim());
    for (std::size_t i = 0; i < grid.size(); ++i) omega[2 * i] = omega[2 * i + 1] = grid[i].norm();
    ComplexSparseMatrix h_rad = fock::second_quantize_diagonal(*basis, omega);

    const CoupledSpace coupled(h_dirac.dim(), basis);
    const auto id_dirac = ComplexSparseMatrix::identity(h_dirac.dim());
    const auto id_fock = ComplexSparseMatrix::identity(basis->size());
    ComplexSparseMatrix h0 = numerics::kron(h_dirac, id_fock) + numerics::kron(id_dirac, h_rad);
    ComplexSparseMatrix h1 = interaction(coupled, lattice, p.charge, pol, cutoff, gammas);
    ComplexSparseMatrix a = numerics::kron(id_dirac, fock::number_operator(*basis));

    Manifest m;
    m.model = "dirac_maxwell";
    m.numbers["points_per_axis"] = p.points_per_axis;
    m.numbers["spacing"] = p.spacing;
    m.numbers["mass"] = p.mass;
    m.numbers["charge"] = p.charge;
    m.numbers["n_max"] = p.n_max;
    m.numbers["cutoff_width"] = cutoff.width;
    m.numbers["dirac_dim"] = double(h_dirac.dim());
    m.numbers["fock_dim"] = double(basis->size());
    m.numbers["coupling_norm_sum"] =
        std::abs(p.charge) * coupling_norm_sum(pol, cutoff, lattice.momentum_cell_volume(), gammas);
    if (potential.kind == dirac::PotentialKind::coulomb) {
        m.numbers["potential_z"] = potential.z;
        m.numbers["potential_q"] = potential.q;
    }
    m.labels["cutoff_profile"] = profile_name(cutoff.profile);
    m.labels["potential"] = potential_name(potential.kind);

    ModelBundle bundle(std::move(h0), std::move(h1), std::move(a), std::move(m));
    return DiracMaxwellModel{lattice,         std::move(pol),  std::move(cutoff), std::move(basis),
                             std::move(h_dirac), std::move(h_rad), std::move(bundle)};
}

DiracKleinGordonModel dkg_hamiltonian(const DiracKleinGordonParams& p) {
    dirac::PositionLattice lattice(p.points_per_axis, p.spacing);
    const auto gammas = dirac::gamma_set();
    const dirac::PotentialSpec potential =
        p.potential.values.empty() ? dirac::zero_potential(lattice) : p.potential;

    const auto grid = lattice.photon_momenta();
    auto space = fock::OnePhotonSpace::scalar(grid);
    Cutoff cutoff = make_cutoff(grid, p.cutoff);
    auto basis = std::make_shared<const fock::FockBasis>(fock::FockBasis::build(space, p.n_max, p.fock_size_limit));

    ComplexSparseMatrix h_dirac = dirac::dirac_hamiltonian(lattice, p.mass, potential, gammas);
    RVector omega(space.dim());
    for (std::size_t i = 0; i < grid.size(); ++i) omega[i] = grid[i].norm();
    ComplexSparseMatrix h_field = fock::second_quantize_diagonal(*basis, omega);

    const CoupledSpace coupled(h_dirac.dim(), basis);
    const double dv = lattice.momentum_cell_volume();
    const dirac::Matrix4 beta = gammas.beta_c();
    std::vector<Triplet> t;
    if (p.coupling != 0.0) {
        for (Index site = 0; site < lattice.sites(); ++site) {
            const auto phi = fock::segal_field(*basis, scalar_coupling(lattice.position(site), grid, cutoff, dv));
            const SparseStorage& s = phi.storage();
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) {
                    const Complex coeff = p.coupling * beta(r, c);
                    if (coeff == Complex(0.0)) continue;
                    for (Index k = 0; k < s.outerSize(); ++k)
                        for (SparseStorage::InnerIterator it(s, k); it; ++it)
                            t.emplace_back(coupled.index(4 * site + r, it.row()),
                                           coupled.index(4 * site + c, it.col()), coeff * it.value());
                }
        }
    }
    ComplexSparseMatrix h1 = ComplexSparseMatrix::from_triplets(coupled.dim(), t, true);

    const auto id_dirac = ComplexSparseMatrix::identity(h_dirac.dim());
    const auto id_fock = ComplexSparseMatrix::identity(basis->size());
    ComplexSparseMatrix h0 = numerics::kron(h_dirac, id_fock) + numerics::kron(id_dirac, h_field);
    ComplexSparseMatrix a = numerics::kron(id_dirac, fock::number_operator(*basis));

    Manifest m;
    m.model = "dirac_klein_gordon";
    m.numbers["points_per_axis"] = p.points_per_axis;
    m.numbers["spacing"] = p.spacing;
    m.numbers["mass"] = p.mass;
    m.numbers["coupling"] = p.coupling;
    m.numbers["n_max"] = p.n_max;
    m.numbers["cutoff_width"] = cutoff.width;
    m.numbers["dirac_dim"] = double(h_dirac.dim());
    m.numbers["fock_dim"] = double(basis->size());
    m.numbers["coupling_norm_sum"] =
        std::abs(p.coupling) * operator_norm(beta) * scalar_coupling(Vec3::Zero(), grid, cutoff, dv).norm();
    if (potential.kind == dirac::PotentialKind::coulomb) {
        m.numbers["potential_z"] = potential.z;
        m.numbers["potential_q"] = potential.q;
    }
    m.labels["cutoff_profile"] = profile_name(cutoff.profile);
    m.labels["potential"] = potential_name(potential.kind);

    ModelBundle bundle(std::move(h0), std::move(h1), std::move(a), std::move(m));
    return DiracKleinGordonModel{lattice, std::move(cutoff), std::move(basis), std::move(h_dirac),
                                 std::move(h_field), std::move(bundle)};
}

ModelBundle single_mode_toy(double omega, double lambda, int n_max) {
    const auto basis = fock::FockBasis::build(1, n_max);
    const auto n = fock::number_operator(basis);
    ComplexSparseMatrix h0 = Complex(omega, 0.0) * n;
    ComplexSparseMatrix h1 = Complex(lambda, 0.0) * fock::segal_field(basis, fock::PhotonVector(CVector::Ones(1)));
    Manifest m;
    m.model = "toy_single_mode";
    m.numbers["omega"] = omega;
    m.numbers["coupling"] = lambda;
    m.numbers["n_max"] = n_max;
    m.numbers["coupling_norm_sum"] = std::abs(lambda);
    return ModelBundle(std::move(h0), std::move(h1), n, std::move(m));
}

}  // namespace fockdyson::field
