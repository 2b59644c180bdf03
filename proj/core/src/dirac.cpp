#include "fockdyson/dirac.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fockdyson::dirac {

namespace {

using Entry = ExactMatrix4::Entry;

ExactMatrix4 from_rows(std::initializer_list<std::initializer_list<Entry>> rows) {
    ExactMatrix4 m;
    int r = 0;
    for (const auto& row : rows) {
        int c = 0;
        for (const auto& e : row) m(r, c++) = e;
        ++r;
    }
    return m;
}

const Entry I{0, 1};

}  // namespace

// ---------------------------------------------------------------------------
// ExactMatrix4

ExactMatrix4 ExactMatrix4::identity() {
    ExactMatrix4 m;
    for (int i = 0; i < 4; ++i) m(i, i) = Entry(1, 0);
    return m;
}

ExactMatrix4 ExactMatrix4::operator+(const ExactMatrix4& o) const {
    ExactMatrix4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = m_[i][j] + o(i, j);
    return r;
}

ExactMatrix4 ExactMatrix4::operator-(const ExactMatrix4& o) const {
    ExactMatrix4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = m_[i][j] - o(i, j);
    return r;
}

ExactMatrix4 ExactMatrix4::operator*(const ExactMatrix4& o) const {
    ExactMatrix4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Entry acc(0, 0);
            for (int k = 0; k < 4; ++k) acc += m_[i][k] * o(k, j);
            r(i, j) = acc;
        }
    return r;
}

ExactMatrix4 ExactMatrix4::scaled(Entry s) const {
    ExactMatrix4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = s * m_[i][j];
    return r;
}

ExactMatrix4 ExactMatrix4::conj() const {
    ExactMatrix4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = std::conj(m_[i][j]);
    return r;
}

ExactMatrix4 ExactMatrix4::adjoint() const {
    ExactMatrix4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = std::conj(m_[j][i]);
    return r;
}

Matrix4 ExactMatrix4::to_complex() const {
    Matrix4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            r(i, j) = Complex(double(m_[i][j].real()), double(m_[i][j].imag()));
    return r;
}

ExactMatrix4 anticommutator(const ExactMatrix4& a, const ExactMatrix4& b) { return a * b + b * a; }

// ---------------------------------------------------------------------------
// Gamma algebra

GammaSet gamma_set(Representation) {
    GammaSet g;
    g.gamma[0] = from_rows({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, -1, 0}, {0, 0, 0, -1}});
    // gamma^j = [[0, sigma_j], [-sigma_j, 0]]
    g.gamma[1] = from_rows({{0, 0, 0, 1}, {0, 0, 1, 0}, {0, -1, 0, 0}, {-1, 0, 0, 0}});
    g.gamma[2] = from_rows({{0, 0, 0, -I}, {0, 0, I, 0}, {0, I, 0, 0}, {-I, 0, 0, 0}});
    g.gamma[3] = from_rows({{0, 0, 1, 0}, {0, 0, 0, -1}, {-1, 0, 0, 0}, {0, 1, 0, 0}});
    g.beta = g.gamma[0];
    for (int j = 0; j < 3; ++j) g.alpha[j] = g.gamma[0] * g.gamma[j + 1];
    return g;
}

std::string GammaSet::first_violation() const {
    const ExactMatrix4 one = ExactMatrix4::identity();
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
            const ExactMatrix4 expect = (mu == nu) ? one.scaled(Entry(2 * metric[mu], 0)) : ExactMatrix4{};
            if (!(anticommutator(gamma[mu], gamma[nu]) == expect))
                return "{gamma^" + std::to_string(mu) + ", gamma^" + std::to_string(nu) +
                       "} != 2 g^{mu nu}";
        }
    if (!(gamma[0].adjoint() == gamma[0])) return "gamma^0 is not Hermitian";
    for (int j = 1; j < 4; ++j)
        if (!(gamma[j].adjoint() == gamma[j].scaled(Entry(-1, 0))))
            return "gamma^" + std::to_string(j) + " is not anti-Hermitian";
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const ExactMatrix4 expect = (i == j) ? one.scaled(Entry(2, 0)) : ExactMatrix4{};
            if (!(anticommutator(alpha[i], alpha[j]) == expect))
                return "{alpha^" + std::to_string(i + 1) + ", alpha^" + std::to_string(j + 1) +
                       "} != 2 delta";
        }
    for (int j = 0; j < 3; ++j)
        if (!(anticommutator(alpha[j], beta) == ExactMatrix4{}))
            return "{alpha^" + std::to_string(j + 1) + ", beta} != 0";
    if (!(beta * beta == one)) return "beta^2 != 1";
    return {};
}

std::string ConjugationData::first_violation(const GammaSet& g) const {
    if (!(u * u == ExactMatrix4::identity())) return "U^2 != 1";
    if (!(u.conj() == u)) return "UC != CU (U is not real)";
    // With U^2 = 1, U^-1 = U.
    for (int j = 0; j < 3; ++j)
        if (!(u * g.alpha[j] * u == g.alpha[j].conj()))
            return "U^-1 alpha^" + std::to_string(j + 1) + " U != conj(alpha^" + std::to_string(j + 1) + ")";
    if (!(u * g.beta * u == g.beta.conj().scaled(Entry(-1, 0)))) return "U^-1 beta U != -conj(beta)";
    return {};
}

ConjugationData pauli_matrix(const GammaSet& g) {
    std::array<int, 4> perm{0, 1, 2, 3};
    do {
        for (int signs = 0; signs < 16; ++signs) {
            ConjugationData c;
            for (int r = 0; r < 4; ++r) c.u(r, perm[r]) = Entry((signs >> r) & 1 ? -1 : 1, 0);
            if (c.first_violation(g).empty()) return c;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    throw Error("no signed permutation matrix satisfies the conjugation relations");
}

// ---------------------------------------------------------------------------
// Lattice

PositionLattice::PositionLattice(int points_per_axis, double spacing)
    : points_(points_per_axis), spacing_(spacing) {
    if (points_ < 1 || points_ % 2 == 0)
        throw Error("lattice points per axis must be a positive odd number, got " +
                    std::to_string(points_));
    if (!(spacing_ > 0.0)) throw Error("lattice spacing must be positive");
}

std::array<int, 3> PositionLattice::axis_indices(Index site) const {
    const int half = (points_ - 1) / 2;
    const int i3 = static_cast<int>(site % points_);
    const int i2 = static_cast<int>((site / points_) % points_);
    const int i1 = static_cast<int>(site / (static_cast<Index>(points_) * points_));
    return {i1 - half, i2 - half, i3 - half};
}

Vec3 PositionLattice::position(Index site) const {
    const auto n = axis_indices(site);
    return Vec3(spacing_ * (n[0] + 0.5), spacing_ * (n[1] + 0.5), spacing_ * (n[2] + 0.5));
}

Vec3 PositionLattice::minimum_image(Index site) const {
    Vec3 x = position(site);
    const double l = period();
    for (int c = 0; c < 3; ++c) x[c] -= l * std::round(x[c] / l);
    return x;
}

Index PositionLattice::mirror(Index site) const {
    const int half = (points_ - 1) / 2;
    const auto n = axis_indices(site);
    Index out = 0;
    for (int c = 0; c < 3; ++c) {
        // a(n + 1/2) -> -a(n + 1/2) = a(-n - 1 + 1/2)
        int m = -n[c] - 1 + half;
        m = ((m % points_) + points_) % points_;
        out = out * points_ + m;
    }
    return out;
}

std::vector<double> PositionLattice::axis_momenta() const {
    const int half = (points_ - 1) / 2;
    std::vector<double> p;
    for (int m = -half; m <= half; ++m) p.push_back(2.0 * std::numbers::pi * m / period());
    return p;
}

std::vector<Vec3> PositionLattice::photon_momenta() const {
    const int half = (points_ - 1) / 2;
    std::vector<double> axis;
    for (int m = -half; m <= half; ++m) axis.push_back(2.0 * std::numbers::pi * (m + 0.5) / period());
    std::vector<Vec3> k;
    for (double k1 : axis)
        for (double k2 : axis)
            for (double k3 : axis) k.emplace_back(k1, k2, k3);
    return k;
}

double PositionLattice::momentum_cell_volume() const {
    const double dk = 2.0 * std::numbers::pi / period();
    return dk * dk * dk;
}

// ---------------------------------------------------------------------------
// Potentials

void check_coulomb_gate(double z, double q) {
    const double strength = z * q * q;
    if (!(strength < 0.5)) {
        std::ostringstream msg;
        msg.precision(10);
        msg << "Coulomb potential rejected: Z q^2 = " << strength
            << " violates the admissibility threshold Z q^2 < 1/2";
        throw ThresholdError(msg.str());
    }
}

PotentialSpec zero_potential(const PositionLattice& lattice) {
    PotentialSpec v;
    v.kind = PotentialKind::zero;
    v.values.assign(static_cast<std::size_t>(lattice.sites()), Matrix4::Zero());
    return v;
}

PotentialSpec coulomb_values(const PositionLattice& lattice, double z, double q) {
    check_coulomb_gate(z, q);
    PotentialSpec v;
    v.kind = PotentialKind::coulomb;
    v.z = z;
    v.q = q;
    v.values.reserve(static_cast<std::size_t>(lattice.sites()));
    for (Index s = 0; s < lattice.sites(); ++s) {
        const double r = lattice.minimum_image(s).norm();
        v.values.push_back(Matrix4::Identity() * Complex(-z * q * q / r, 0.0));
    }
    return v;
}

PotentialSpec table_potential(std::vector<Matrix4> values) {
    for (std::size_t s = 0; s < values.size(); ++s) {
        const double defect = (values[s] - values[s].adjoint()).cwiseAbs().maxCoeff();
        if (defect > numerics::default_tolerances().hermitian)
            throw NotHermitianError("potential matrix at site " + std::to_string(s) + " is not Hermitian",
                                    defect);
    }
    PotentialSpec v;
    v.kind = PotentialKind::table;
    v.values = std::move(values);
    return v;
}

PotentialSpec read_potential(const std::string& path, const PositionLattice& lattice) {
    const auto m = numerics::read_matrix(path);
    if (m.dim() != 4 * lattice.sites())
        throw DimensionError("potential file dimension " + std::to_string(m.dim()) + " != 4 x sites = " +
                             std::to_string(4 * lattice.sites()));
    std::vector<Matrix4> values(static_cast<std::size_t>(lattice.sites()), Matrix4::Zero());
    const auto& s = m.storage();
    for (Index k = 0; k < s.outerSize(); ++k)
        for (SparseStorage::InnerIterator it(s, k); it; ++it) {
            if (it.row() / 4 != it.col() / 4)
                throw ParseError("potential file couples different sites at (" + std::to_string(it.row()) +
                                 ", " + std::to_string(it.col()) + ")");
            values[static_cast<std::size_t>(it.row() / 4)](it.row() % 4, it.col() % 4) = it.value();
        }
    return table_potential(std::move(values));
}

// ---------------------------------------------------------------------------
// Dirac operator

ComplexSparseMatrix dirac_hamiltonian(const PositionLattice& lattice, double mass,
                                      const PotentialSpec& v, const GammaSet& g) {
    if (!(mass > 0.0)) throw Error("Dirac mass must be positive");
    const Index n_sites = lattice.sites();
    if (static_cast<Index>(v.values.size()) != n_sites)
        throw DimensionError("potential has " + std::to_string(v.values.size()) + " sites, lattice has " +
                             std::to_string(n_sites));
    for (std::size_t s = 0; s < v.values.size(); ++s) {
        const double defect = (v.values[s] - v.values[s].adjoint()).cwiseAbs().maxCoeff();
        if (defect > numerics::default_tolerances().hermitian)
            throw NotHermitianError("potential matrix at site " + std::to_string(s) + " is not Hermitian",
                                    defect);
    }

    const int l = lattice.points_per_axis();
    const double a = lattice.spacing();
    const auto p = lattice.axis_momenta();

    // One-axis momentum operator in position space:
    // P[n, n'] = (1/L) sum_m p_m exp(i p_m a (n - n')) = (i/L) sum_m p_m sin(p_m a (n - n')).
    CMatrix p1(l, l);
    p1.setZero();
    for (int n = 0; n < l; ++n)
        for (int n2 = n + 1; n2 < l; ++n2) {
            double s = 0.0;
            for (double pm : p) s += pm * std::sin(pm * a * (n - n2));
            p1(n, n2) = Complex(0.0, s / l);
            p1(n2, n) = std::conj(p1(n, n2));
        }

    const Matrix4 beta = g.beta_c();
    std::array<Matrix4, 3> alpha{g.alpha_c(0), g.alpha_c(1), g.alpha_c(2)};

    std::vector<Triplet> t;
    const Index stride[3] = {static_cast<Index>(l) * l, l, 1};
    for (Index site = 0; site < n_sites; ++site) {
        const Matrix4 local = mass * beta + v.values[static_cast<std::size_t>(site)];
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                if (local(r, c) != Complex(0.0)) t.emplace_back(4 * site + r, 4 * site + c, local(r, c));

        const auto n = lattice.axis_indices(site);
        const int half = (l - 1) / 2;
        for (int axis = 0; axis < 3; ++axis) {
            const int from = n[axis] + half;
            for (int to = 0; to < l; ++to) {
                if (to == from) continue;
                const Complex hop = p1(to, from);
                if (hop == Complex(0.0)) continue;
                const Index other = site + (to - from) * stride[axis];
                for (int r = 0; r < 4; ++r)
                    for (int c = 0; c < 4; ++c)
                        if (alpha[axis](r, c) != Complex(0.0))
                            t.emplace_back(4 * other + r, 4 * site + c, alpha[axis](r, c) * hop);
            }
        }
    }
    return ComplexSparseMatrix::from_triplets(4 * n_sites, t, true);
}

CpCheck cp_invariant(const PositionLattice& lattice, const PotentialSpec& v,
                     const ConjugationData& c, const numerics::Tolerances& tol) {
    if (static_cast<Index>(v.values.size()) != lattice.sites())
        throw DimensionError("potential and lattice site counts differ");
    const Matrix4 u = c.u.to_complex();
    CpCheck out;
    for (Index s = 0; s < lattice.sites(); ++s) {
        const Index m = lattice.mirror(s);
        if (lattice.mirror(m) != s) throw Error("lattice reflection is not an involution");
        const Matrix4 lhs = u * v.values[static_cast<std::size_t>(s)] * u;
        const Matrix4 rhs = v.values[static_cast<std::size_t>(m)].conjugate();
        const Matrix4 diff = lhs - rhs;
        Eigen::JacobiSVD<Matrix4> svd(diff);
        out.defect = std::max(out.defect, svd.singularValues()[0]);
    }
    out.invariant = out.defect < tol.cp_defect;
    return out;
}

}  // namespace fockdyson::dirac
