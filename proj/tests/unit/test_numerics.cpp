#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "fockdyson/fock.hpp"
#include "fockdyson/numerics.hpp"

using namespace fockdyson;
using numerics::ComplexSparseMatrix;

namespace {

CMatrix random_hermitian(Index n, std::mt19937_64& rng, double density = 1.0) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    CMatrix m = CMatrix::Zero(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i <= j; ++i) {
            if (i != j && coin(rng) > density) continue;
            m(i, j) = i == j ? Complex(normal(rng), 0.0) : Complex(normal(rng), normal(rng));
            m(j, i) = std::conj(m(i, j));
        }
    return m;
}

double max_entry(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("Hermitian flag is verified on construction") {
    CMatrix m(2, 2);
    m << 1.0, Complex(0.0, 1.0), Complex(0.0, 1.0), 2.0;
    try {
        (void)ComplexSparseMatrix::from_dense(m, true);
        FAIL("expected rejection");
    } catch (const NotHermitianError& e) {
        CHECK(e.max_asymmetry() == doctest::Approx(2.0));
    }
    CHECK_NOTHROW((void)ComplexSparseMatrix::from_dense(m, false));
    CHECK_THROWS_AS((void)ComplexSparseMatrix::from_dense(CMatrix::Zero(2, 3), false), DimensionError);
}

TEST_CASE("explicit zeros are never stored") {
    std::vector<Triplet> t{{0, 0, 1.0}, {0, 1, 1.0}, {0, 1, -1.0}, {1, 1, 0.0}};
    const auto m = ComplexSparseMatrix::from_triplets(2, t, true);
    CHECK(m.nnz() == 1);
    CHECK_THROWS_AS((void)ComplexSparseMatrix::from_triplets(2, std::vector<Triplet>{{2, 0, 1.0}}, false), Error);
}

TEST_CASE("matexp of zero and of a diagonal matrix") {
    const auto zero = ComplexSparseMatrix::zero(3);
    CHECK(max_entry(numerics::matexp(zero, 2.7) - CMatrix::Identity(3, 3)) == 0.0);

    const auto d = ComplexSparseMatrix::diagonal((RVector(2) << 1.0, 2.0).finished());
    const CMatrix u = numerics::matexp(d, std::numbers::pi);
    CHECK(std::abs(u(0, 0) - Complex(-1.0, 0.0)) < 1e-15);
    CHECK(std::abs(u(1, 1) - Complex(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(u(0, 1)) == 0.0);
}

TEST_CASE("matexp rejects a non-Hermitian matrix with its asymmetry") {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 1) = 0.5;
    const auto a = ComplexSparseMatrix::from_dense(m, false);
    try {
        (void)numerics::matexp(a, 1.0);
        FAIL("expected rejection");
    } catch (const NotHermitianError& e) {
        CHECK(e.max_asymmetry() == doctest::Approx(0.5));
    }
}

TEST_CASE("matexp inverse pair and agreement with an independent exponential") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        const CMatrix h = random_hermitian(6, rng);
        const auto m = ComplexSparseMatrix::from_dense(h, true);
        const CMatrix u = numerics::matexp(m, 1.0);
        const CMatrix v = numerics::matexp(m, -1.0);
        CHECK(max_entry(u * v - CMatrix::Identity(6, 6)) < 1e-11);
        CHECK(max_entry(u.adjoint() * u - CMatrix::Identity(6, 6)) < 1e-11);
        // Pade-based exponential from Eigen's MatrixFunctions module.
        const CMatrix oracle = (Complex(0.0, -1.0) * h).exp();
        CHECK(max_entry(u - oracle) < 1e-12);
    }
}

TEST_CASE("matexp group law and commuting sums") {
    std::mt19937_64 rng(7);
    const CMatrix h = random_hermitian(8, rng, 0.4);
    const auto m = ComplexSparseMatrix::from_dense(h, true);
    std::uniform_real_distribution<double> time(-10.0, 10.0);
    for (int trial = 0; trial < 10; ++trial) {
        const double s = time(rng), t = time(rng);
        CHECK(max_entry(numerics::matexp(m, s) * numerics::matexp(m, t) - numerics::matexp(m, s + t)) < 1e-10);
    }
    // Commuting pair built from one eigenbasis.
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const CMatrix w = es.eigenvectors();
    const CMatrix a = w * RVector::LinSpaced(8, -1.0, 2.0).asDiagonal() * w.adjoint();
    const CMatrix b = w * RVector::LinSpaced(8, 3.0, 0.5).asDiagonal() * w.adjoint();
    const auto ma = ComplexSparseMatrix::from_dense(0.5 * (a + a.adjoint()), true);
    const auto mb = ComplexSparseMatrix::from_dense(0.5 * (b + b.adjoint()), true);
    CHECK(max_entry(numerics::matexp(ma + mb, 0.8) - numerics::matexp(ma, 0.8) * numerics::matexp(mb, 0.8)) < 1e-11);
}

TEST_CASE("block decomposition matches a dense eigensolve") {
    std::mt19937_64 rng(3);
    // Three diagonal blocks, scrambled by a permutation.
    CMatrix h = CMatrix::Zero(9, 9);
    h.block(0, 0, 3, 3) = random_hermitian(3, rng);
    h.block(3, 3, 4, 4) = random_hermitian(4, rng);
    h.block(7, 7, 2, 2) = random_hermitian(2, rng);
    Eigen::PermutationMatrix<Eigen::Dynamic> p(9);
    p.indices() << 4, 0, 8, 2, 6, 1, 3, 7, 5;
    h = (p * h * p.transpose()).eval();
    const auto m = ComplexSparseMatrix::from_dense(h, true);

    CHECK(numerics::connected_components(m.storage()).size() == 3);
    const auto d = numerics::SpectralDecomposition::compute(m);
    CHECK(d.blocks().size() == 3);
    Eigen::SelfAdjointEigenSolver<CMatrix> dense(h);
    CHECK((d.eigenvalues() - dense.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);

    const CMatrix w = d.eigenvectors();
    CHECK(max_entry(w.adjoint() * w - CMatrix::Identity(9, 9)) < 1e-12);
    CHECK(max_entry(h * w - w * d.eigenvalues().asDiagonal()) < 1e-12);

    CVector v = CVector::Random(9);
    CHECK((d.from_eigen(d.to_eigen(v)) - v).norm() < 1e-13);
    const auto sq = d.function([](double x) { return Complex(x * x); }, true);
    CHECK(max_entry(sq.to_dense() - h * h) < 1e-12);
}

TEST_CASE("oversized blocks are refused") {
    numerics::Tolerances tol;
    tol.dense_limit = 3;
    CMatrix h = CMatrix::Ones(4, 4);
    CHECK_THROWS_AS((void)numerics::SpectralDecomposition::compute(ComplexSparseMatrix::from_dense(h, true), tol),
                    SizeLimitError);
}

TEST_CASE("spectral projections of diag(0, 1, 2)") {
    const auto m = ComplexSparseMatrix::diagonal((RVector(3) << 0.0, 1.0, 2.0).finished());
    const auto p = numerics::spectral_projection(m, 0.0, 1.0);
    CHECK(p.rank == 2);
    CHECK(p.boundary_tie);
    CMatrix expected = CMatrix::Zero(3, 3);
    expected(0, 0) = expected(1, 1) = 1.0;
    CHECK(max_entry(p.matrix.to_dense() - expected) == 0.0);

    const auto empty = numerics::spectral_projection(m, 5.0, 9.0);
    CHECK(empty.rank == 0);
    CHECK(empty.matrix.nnz() == 0);
    CHECK_FALSE(empty.boundary_tie);
    CHECK_THROWS_AS((void)numerics::spectral_projection(m, 2.0, 1.0), Error);
}

TEST_CASE("number-operator projection rank from occupation counting") {
    const auto basis = fock::FockBasis::build(2, 2);
    const auto n = fock::number_operator(basis);
    const auto p = numerics::spectral_projection(n, 0.0, 1.0);
    // Occupations (n1, n2) with n1 + n2 <= 1, enumerated directly.
    int count = 0;
    for (int a = 0; a <= 2; ++a)
        for (int b = 0; b <= 2; ++b)
            if (a + b <= 1) ++count;
    CHECK(p.rank == count);
    CHECK(count == 3);
}

TEST_CASE("projection properties on random Hermitian matrices") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (int trial = 0; trial < 10; ++trial) {
        const CMatrix h = random_hermitian(7, rng, 0.5);
        const auto d = numerics::SpectralDecomposition::compute(ComplexSparseMatrix::from_dense(h, true));
        double a = unif(rng), b = unif(rng);
        if (a > b) std::swap(a, b);
        const double lo = a - 1.0, hi = b + 1.0;
        const CMatrix pi = numerics::spectral_projection(d, a, b).matrix.to_dense();
        const CMatrix pj = numerics::spectral_projection(d, lo, hi).matrix.to_dense();
        CHECK(max_entry(pi * pi - pi) < 1e-12);
        CHECK(max_entry(pi - pi.adjoint()) < 1e-12);
        CHECK(max_entry(pi * pj - pi) < 1e-11);

        // Partition of the spectrum into three pieces.
        const double cut1 = d.min_eigenvalue() + 0.3 * (d.max_eigenvalue() - d.min_eigenvalue()) + 1e-3;
        const double cut2 = d.min_eigenvalue() + 0.7 * (d.max_eigenvalue() - d.min_eigenvalue()) + 1e-3;
        const CMatrix total = numerics::spectral_projection(d, d.min_eigenvalue() - 1.0, cut1).matrix.to_dense() +
                              numerics::spectral_projection(d, std::nextafter(cut1, 1e9), cut2).matrix.to_dense() +
                              numerics::spectral_projection(d, std::nextafter(cut2, 1e9), d.max_eigenvalue() + 1.0)
                                  .matrix.to_dense();
        CHECK(max_entry(total - CMatrix::Identity(7, 7)) < 1e-11);
    }
}

TEST_CASE("kron and commutator") {
    CMatrix a(2, 2), b(2, 2);
    a << 1.0, 2.0, 2.0, 3.0;
    b << 0.0, Complex(0, -1), Complex(0, 1), 0.0;
    const auto k = numerics::kron(ComplexSparseMatrix::from_dense(a, true), ComplexSparseMatrix::from_dense(b, true));
    CMatrix expected(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) expected.block(2 * i, 2 * j, 2, 2) = a(i, j) * b;
    CHECK(max_entry(k.to_dense() - expected) == 0.0);
    CHECK(k.hermitian());
    const auto ma = ComplexSparseMatrix::from_dense(a, true);
    const auto mb = ComplexSparseMatrix::from_dense(b, true);
    CHECK(numerics::commutator_max(ma, mb) == doctest::Approx(max_entry(a * b - b * a)));
}

TEST_CASE("coordinate format round trip and malformed input") {
    std::mt19937_64 rng(5);
    const auto m = ComplexSparseMatrix::from_dense(random_hermitian(5, rng, 0.5), true);
    std::stringstream s;
    numerics::write_matrix(s, m);
    std::string header;
    std::getline(s, header);
    std::ostringstream expected_header;
    expected_header << 5 << ' ' << m.nnz() << ' ' << 1;
    CHECK(header == expected_header.str());
    s.seekg(0);
    const auto back = numerics::read_matrix(s);
    CHECK(back.hermitian());
    CHECK(max_entry(back.to_dense() - m.to_dense()) == 0.0);

    std::istringstream bad_index("2 1 0\n2 0 1.0 0.0\n");
    CHECK_THROWS_AS((void)numerics::read_matrix(bad_index), ParseError);
    std::istringstream short_body("2 2 0\n0 0 1.0 0.0\n");
    CHECK_THROWS_AS((void)numerics::read_matrix(short_body), ParseError);
    std::istringstream not_hermitian("2 1 1\n0 1 1.0 0.0\n");
    CHECK_THROWS_AS((void)numerics::read_matrix(not_hermitian), NotHermitianError);
}
