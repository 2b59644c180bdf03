#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fockdyson/fock.hpp"

using namespace fockdyson;
using namespace fockdyson::fock;

namespace {

CVector random_vector(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    CVector v(n);
    for (Index i = 0; i < n; ++i) v[i] = Complex(normal(rng), normal(rng));
    return v;
}

// Number of occupation vectors of d modes with total <= n, by direct enumeration.
Index enumerate_states(int d, int n) {
    if (d == 0) return 1;
    Index count = 0;
    for (int k = 0; k <= n; ++k) count += enumerate_states(d - 1, n - k);
    return count;
}

double max_entry(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("basis sizes") {
    CHECK(FockBasis::build(1, 3).size() == 4);
    CHECK(FockBasis::build(2, 2).size() == 6);
    CHECK(FockBasis::build(5, 0).size() == 1);
    for (int d = 1; d <= 5; ++d)
        for (int n = 0; n <= 4; ++n) {
            CHECK(FockBasis::build(d, n).size() == enumerate_states(d, n));
            CHECK(FockBasis::size_estimate(d, n) == doctest::Approx(double(enumerate_states(d, n))));
        }
    CHECK_THROWS_AS((void)FockBasis::build(2, -1), Error);
}

TEST_CASE("size limit refusal carries the estimate") {
    try {
        (void)FockBasis::build(200, 4, 1000);
        FAIL("expected refusal");
    } catch (const SizeLimitError& e) {
        CHECK(e.estimated_size() == doctest::Approx(FockBasis::size_estimate(200, 4)));
    }
}

TEST_CASE("graded lexicographic order, lookup and dump") {
    const auto b = FockBasis::build(2, 2);
    std::ostringstream dump;
    b.dump(dump);
    CHECK(dump.str() ==
          "0 : (0,0)\n"
          "1 : (0,1)\n"
          "2 : (1,0)\n"
          "3 : (0,2)\n"
          "4 : (1,1)\n"
          "5 : (2,0)\n");
    const auto big = FockBasis::build(4, 3);
    for (Index i = 0; i < big.size(); ++i) CHECK(big.lookup(big.state(i)) == i);
    for (int n = 0; n <= 3; ++n)
        for (Index i = big.band_begin(n); i < big.band_begin(n + 1); ++i) CHECK(big.total(i) == n);
    const std::vector<Occupation> outside{2, 2, 0, 0};
    CHECK(big.lookup(outside) == -1);
}

TEST_CASE("one-photon spaces") {
    CHECK_THROWS_AS((void)OnePhotonSpace::photons({Vec3(0.0, 0.0, 1.0)}), Error);
    CHECK_THROWS_AS((void)OnePhotonSpace::photons({Vec3(1.0, 0.0, 0.0), Vec3(1.0, 0.0, 0.0)}), Error);
    const auto s = OnePhotonSpace::photons({Vec3(1.0, 0.0, 0.0), Vec3(0.0, 1.0, 1.0)});
    CHECK(s.dim() == 4);
    CHECK(s.mode(1, 1) == 3);
    CHECK_THROWS_AS(PhotonVector(CVector::Constant(1, Complex(std::nan(""), 0.0))), Error);
}

TEST_CASE("single-mode ladder matrix elements") {
    const auto b = FockBasis::build(1, 5);
    const PhotonVector one(CVector::Ones(1));
    const CMatrix a = annihilator(b, one).to_dense();
    const CMatrix ad = creator(b, one).to_dense();
    for (int n = 0; n <= 5; ++n)
        for (int m = 0; m <= 5; ++m) {
            // <m| a |n> = sqrt(n) delta_{m, n-1}
            const double expected = m == n - 1 ? std::sqrt(double(n)) : 0.0;
            CHECK(std::abs(a(m, n) - expected) < 1e-15);
        }
    CHECK(max_entry(ad - a.adjoint()) == 0.0);
    // a |0> = 0
    CHECK(a.col(0).norm() == 0.0);
}

TEST_CASE("segal field on one mode") {
    const auto b = FockBasis::build(1, 2);
    CHECK(segal_field(b, PhotonVector(CVector::Zero(1))).nnz() == 0);
    const auto phi = segal_field(b, PhotonVector(CVector::Ones(1)));
    CHECK(phi.hermitian());
    const CMatrix d = phi.to_dense();
    for (int n = 1; n <= 2; ++n) CHECK(std::abs(d(n - 1, n) - std::sqrt(n / 2.0)) < 1e-15);
    CHECK(std::abs(d(0, 2)) == 0.0);
    CHECK(std::abs(d(1, 1)) == 0.0);
}

TEST_CASE("annihilation is antilinear and matches symmetric-tensor inner products") {
    // Two modes: a(F)|n1, n2> = conj(F1) sqrt(n1)|n1-1, n2> + conj(F2) sqrt(n2)|n1, n2-1>.
    const auto b = FockBasis::build(2, 3);
    const Complex f1(0.3, -0.4), f2(-1.1, 0.2);
    CVector fv(2);
    fv << f1, f2;
    const CMatrix a = annihilator(b, PhotonVector(fv)).to_dense();
    for (Index col = 0; col < b.size(); ++col) {
        const auto s = b.state(col);
        CVector expected = CVector::Zero(b.size());
        if (s[0] > 0) {
            std::vector<Occupation> t(s.begin(), s.end());
            --t[0];
            expected[b.lookup(t)] += std::conj(f1) * std::sqrt(double(s[0]));
        }
        if (s[1] > 0) {
            std::vector<Occupation> t(s.begin(), s.end());
            --t[1];
            expected[b.lookup(t)] += std::conj(f2) * std::sqrt(double(s[1]));
        }
        CHECK((a.col(col) - expected).norm() < 1e-14);
    }
    CHECK_THROWS_AS((void)annihilator(b, PhotonVector(CVector::Ones(3))), DimensionError);
}

TEST_CASE("canonical commutation away from the truncation edge") {
    std::mt19937_64 rng(17);
    const int n_max = 3;
    const auto b = FockBasis::build(3, n_max);
    const Index inner = b.band_begin(n_max);  // states with total <= n_max - 1
    for (int trial = 0; trial < 20; ++trial) {
        const CVector f = random_vector(3, rng), g = random_vector(3, rng);
        const CMatrix af = annihilator(b, PhotonVector(f)).to_dense();
        const CMatrix ag_dag = creator(b, PhotonVector(g)).to_dense();
        const CMatrix comm = af * ag_dag - ag_dag * af;
        const Complex fg = f.dot(g);  // <F, G>, antilinear in F
        const CMatrix block = comm.topLeftCorner(inner, inner);
        CHECK(max_entry(block - fg * CMatrix::Identity(inner, inner)) < 1e-12);
    }
}

TEST_CASE("second quantization") {
    const auto b = FockBasis::build(1, 4);
    const auto n = number_operator(b);
    CHECK(n.is_diagonal());
    for (Index i = 0; i < b.size(); ++i) CHECK(n.to_dense()(i, i).real() == doctest::Approx(double(i)));

    const double omega = 2.5;
    const auto h = second_quantize(b, CMatrix::Constant(1, 1, omega));
    for (Index i = 0; i < b.size(); ++i) CHECK(std::abs(h.to_dense()(i, i) - omega * double(i)) < 1e-14);

    const auto b2 = FockBasis::build(2, 2);
    CMatrix hd = CMatrix::Zero(2, 2);
    hd(0, 0) = 0.7;
    hd(1, 1) = 1.9;
    const auto d = second_quantize(b2, hd);
    CHECK(d.is_diagonal());
    const std::vector<Occupation> one_one{1, 1};
    const Index k = b2.lookup(one_one);
    CHECK(d.to_dense()(k, k).real() == doctest::Approx(0.7 + 1.9));
    CHECK(std::abs(d.to_dense()(0, 0)) == 0.0);
    CHECK(max_entry(second_quantize(b2, CMatrix::Identity(2, 2)).to_dense() - number_operator(b2).to_dense()) <
          1e-15);

    CMatrix bad = CMatrix::Zero(2, 2);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS((void)second_quantize(b2, bad), NotHermitianError);
}

TEST_CASE("number operator spectrum is 0..n_max") {
    const auto b = FockBasis::build(3, 4);
    const auto d = numerics::SpectralDecomposition::compute(number_operator(b));
    const auto levels = d.levels();
    REQUIRE(levels.size() == 5);
    for (int n = 0; n <= 4; ++n) CHECK(levels[n] == doctest::Approx(double(n)));
}

TEST_CASE("number operator commutes with every second-quantized h") {
    std::mt19937_64 rng(23);
    const auto b = FockBasis::build(3, 3);
    const auto n = number_operator(b);
    for (int trial = 0; trial < 5; ++trial) {
        CMatrix h(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) h(i, j) = Complex(std::normal_distribution<double>()(rng), 0.1 * j);
        h = (0.5 * (h + h.adjoint())).eval();
        CHECK(numerics::commutator_max(n, second_quantize(b, h)) < 1e-12);
    }
}

TEST_CASE("segal field couples number n only to n +- 1") {
    std::mt19937_64 rng(29);
    const auto b = FockBasis::build(3, 3);
    const auto phi = segal_field(b, PhotonVector(random_vector(3, rng)));
    const SparseStorage& s = phi.storage();
    for (Index k = 0; k < s.outerSize(); ++k)
        for (SparseStorage::InnerIterator it(s, k); it; ++it)
            CHECK(std::abs(b.total(it.row()) - b.total(it.col())) == 1);
}

TEST_CASE("ladder bounds on random vectors") {
    std::mt19937_64 rng(31);
    for (const auto& [d, n_max] : std::vector<std::pair<int, int>>{{2, 4}, {4, 3}}) {
        const auto b = FockBasis::build(d, n_max);
        const auto sqrt_n = numerics::SpectralDecomposition::compute(number_operator(b))
                                .function([](double x) { return Complex(std::sqrt(std::max(x, 0.0))); }, true);
        double worst_a = 1e9, worst_ad = 1e9;
        for (int s = 0; s < 1000; ++s) {
            const PhotonVector f(random_vector(d, rng));
            const CVector psi = random_vector(b.size(), rng);
            const double nf = f.norm(), root = (sqrt_n * psi).norm();
            worst_a = std::min(worst_a, nf * root - (annihilator(b, f) * psi).norm());
            worst_ad = std::min(worst_ad, nf * root + nf * psi.norm() - (creator(b, f) * psi).norm());
        }
        CHECK(worst_a >= -1e-12);
        CHECK(worst_ad >= -1e-12);
    }
}
