#include <cmath>
#include <random>

#include "doctest.h"
#include "fockdyson/assumptions.hpp"
#include "fockdyson/field.hpp"
#include "fockdyson/fock.hpp"

using namespace fockdyson;
using namespace fockdyson::assumptions;
using numerics::ComplexSparseMatrix;

namespace {

CMatrix random_unitary(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    CMatrix m(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) m(i, j) = Complex(normal(rng), normal(rng));
    return Eigen::HouseholderQR<CMatrix>(m).householderQ();
}

ComplexSparseMatrix hermitian_dense(const CMatrix& m) {
    return ComplexSparseMatrix::from_dense(0.5 * (m + m.adjoint()), true);
}

}  // namespace

TEST_CASE("condition I") {
    const auto basis = fock::FockBasis::build(2, 3);
    const auto n = fock::number_operator(basis);
    const auto ok = check_I(n);
    CHECK(ok.pass);
    CHECK(ok.hermitian_defect == 0.0);
    CHECK(ok.min_eigenvalue == 0.0);

    const auto neg = check_I(Complex(-1.0, 0.0) * ComplexSparseMatrix::identity(4));
    CHECK_FALSE(neg.pass);
    CHECK(neg.min_eigenvalue == doctest::Approx(-1.0));

    // A bundle with A = -1 fails certification as a whole.
    const auto id = ComplexSparseMatrix::identity(4);
    Manifest m;
    m.model = "negative";
    m.numbers["n_max"] = 1;
    const ModelBundle bad(id, ComplexSparseMatrix::zero(4), Complex(-1.0, 0.0) * id, m);
    const auto report = certify(bad);
    CHECK_FALSE(report.cond_I.pass);
    CHECK_FALSE(report.all_pass);
}

TEST_CASE("condition II") {
    const auto basis = fock::FockBasis::build(2, 2);
    const auto n = fock::number_operator(basis);
    const auto r = check_II(n, fock::second_quantize_diagonal(basis, RVector::LinSpaced(2, 0.5, 1.5)));
    CHECK(r.pass);
    CHECK(r.levels == 3);
    CHECK(r.commutator < 1e-12);

    // Simultaneously diagonal in a random basis, with a degenerate A.
    std::mt19937_64 rng(5);
    const CMatrix w = random_unitary(6, rng);
    RVector av(6), hv(6);
    av << 0, 0, 1, 1, 1, 2;
    hv << -0.3, 0.8, 1.1, 2.5, -1.4, 0.2;
    const auto a = hermitian_dense(w * av.cast<Complex>().asDiagonal() * w.adjoint());
    const auto h0 = hermitian_dense(w * hv.cast<Complex>().asDiagonal() * w.adjoint());
    const auto rr = check_II(a, h0);
    CHECK(rr.pass);
    CHECK(rr.levels == 3);

    // The field operator does not commute with N.
    const auto phi = fock::segal_field(fock::FockBasis::build(1, 4), fock::PhotonVector(CVector::Ones(1)));
    const auto bad = check_II(fock::number_operator(fock::FockBasis::build(1, 4)), phi);
    CHECK_FALSE(bad.pass);
    CHECK(bad.commutator > 0.1);
}

TEST_CASE("condition III on the single-mode toy") {
    const double lambda = 0.1;
    const auto b = field::single_mode_toy(1.0, lambda, 14);
    const auto r = check_III(b.h1(), b.a(), b.manifest().number("coupling_norm_sum"));
    CHECK(r.pass);
    CHECK(r.analytic_source == "manifest");
    CHECK(r.analytic_a == doctest::Approx(2.0 * lambda));
    CHECK(r.analytic_b == doctest::Approx(lambda));
    CHECK(r.rel_bound_a <= r.analytic_a + 1e-9);
    CHECK(r.rel_bound_b <= r.analytic_b + 1e-9);
    CHECK(r.analytic_min_slack >= -1e-12);
    CHECK(r.random_samples == 10000);
    CHECK(r.basis_samples == b.dim());

    // Without the manifest entry the pair comes from the first band block.
    const auto spec = SpectralDecomposition::compute(b.a());
    const auto [a_band, b_band] = analytic_from_band_norm(b.h1(), spec);
    CHECK(std::abs(a_band - 2.0 * lambda) < 1e-9);
    CHECK(std::abs(b_band - lambda) < 1e-9);
    const auto fallback = check_III(b.h1(), b.a(), std::nullopt);
    CHECK(fallback.analytic_source == "band_norm");
    CHECK(fallback.pass);
}

TEST_CASE("condition III with zero coupling") {
    const auto b = field::single_mode_toy(1.0, 0.0, 6);
    const auto r = check_III(b.h1(), b.a(), 0.0);
    CHECK(r.pass);
    CHECK(r.rel_bound_a == 0.0);
    CHECK(r.rel_bound_b == 0.0);
}

TEST_CASE("condition III rejects a bound that the samples violate") {
    // The manifest claims a constant 100 times too small.
    const auto b = field::single_mode_toy(1.0, 0.5, 8);
    const auto r = check_III(b.h1(), b.a(), 0.005);
    CHECK_FALSE(r.pass);
}

TEST_CASE("condition III stays within the analytic pair as n_max grows") {
    for (int n_max : {2, 4, 6}) {
        const auto b = field::single_mode_toy(1.0, 0.3, n_max);
        const auto r = check_III(b.h1(), b.a(), b.manifest().number("coupling_norm_sum"));
        CHECK(r.pass);
        CHECK(r.rel_bound_a <= 0.6 + 1e-9);
    }
}

TEST_CASE("condition IV band widths") {
    const auto toy = field::single_mode_toy(1.0, 0.2, 6);
    const auto r = check_IV(toy.h1(), toy.a());
    CHECK(r.pass);
    CHECK(r.band_width_b == doctest::Approx(1.0));
    CHECK(r.residual <= 1e-12);

    // phi^2 moves two quanta.
    const CMatrix phi = toy.h1().to_dense();
    const auto sq = ComplexSparseMatrix::from_dense(phi * phi, true);
    CHECK(check_IV(sq, toy.a()).band_width_b == doctest::Approx(2.0));

    // An H1 commuting with A has b = 0 and says so.
    const auto diag = check_IV(toy.a(), toy.a());
    CHECK(diag.pass);
    CHECK(diag.band_width_b == 0.0);
    CHECK_FALSE(diag.note.empty());
}

TEST_CASE("Dirac-Maxwell and Dirac-Klein-Gordon certify") {
    field::DiracMaxwellParams p;
    p.points_per_axis = 1;
    p.charge = std::sqrt(1.0 / 137.035999);
    p.n_max = 3;
    const auto dm = certify(field::total_hamiltonian(p).bundle);
    CHECK(dm.all_pass);
    CHECK(dm.cond_IV.band_width_b == doctest::Approx(1.0));
    CHECK(dm.model == "dirac_maxwell");

    field::DiracKleinGordonParams k;
    k.points_per_axis = 1;
    k.coupling = 0.1;
    k.n_max = 3;
    const auto dkg = certify(field::dkg_hamiltonian(k).bundle);
    CHECK(dkg.all_pass);
    CHECK(dkg.cond_IV.band_width_b == doctest::Approx(1.0));
}

TEST_CASE("reports are deterministic for a fixed seed") {
    const auto b = field::single_mode_toy(1.0, 0.1, 10);
    SamplingOptions opts;
    opts.seed = 77;
    opts.samples = 2000;
    const auto first = to_json(certify(b, opts));
    CHECK(first == to_json(certify(b, opts)));
    CHECK(first.find("\"seed\": 77") != std::string::npos);
    opts.seed = 78;
    CHECK(certify(b, opts).all_pass);
}
