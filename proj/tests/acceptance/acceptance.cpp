// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "fockdyson/assumptions.hpp"
#include "fockdyson/dirac.hpp"
#include "fockdyson/dyson.hpp"
#include "fockdyson/experiment.hpp"
#include "fockdyson/field.hpp"
#include "fockdyson/fock.hpp"
#include "json.hpp"

using namespace fockdyson;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = budget_s <= 0.0 || secs < budget_s;
    const bool pass = out.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s criterion %d (%s): %s [%.2f s", pass ? "PASS" : "FAIL", id, title, out.detail.c_str(), secs);
    if (budget_s > 0.0) std::printf(" / budget %.0f s", budget_s);
    std::printf("]\n");
    std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

CVector random_vector(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    CVector v(n);
    for (Index i = 0; i < n; ++i) v[i] = Complex(normal(rng), normal(rng));
    return v;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + FOCKDYSON_CLI + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const double kAlpha = 1.0 / 137.035999;

// Toy of the propagation criteria: omega = 1, lambda = 0.1, n_max = 14.
dyson::DysonRun toy_run() {
    const auto toy = field::single_mode_toy(1.0, 0.1, 14);
    return dyson::dyson_propagate(toy, dyson::basis_vector(toy.dim(), 0), 1.0, 0.0, 12, 16);
}

}  // namespace

int main() {
    criterion(1, "exact gamma algebra and Pauli conjugation", 1.0, [] {
        const auto g = dirac::gamma_set();
        const auto c = dirac::pauli_matrix(g);
        const std::string a = g.first_violation(), b = c.first_violation(g);
        const bool beta_sq = g.beta * g.beta == dirac::ExactMatrix4::identity();
        return Outcome{a.empty() && b.empty() && beta_sq,
                       a.empty() && b.empty() ? "all identities exact in integer arithmetic" : a + b};
    });

    criterion(2, "ladder bounds on random vectors", 10.0, [] {
        std::mt19937_64 rng(2);
        double worst = 1e9;
        for (const auto& [d, n_max] : std::vector<std::pair<int, int>>{{2, 4}, {4, 3}}) {
            const auto basis = fock::FockBasis::build(d, n_max);
            const auto sqrt_n = numerics::SpectralDecomposition::compute(fock::number_operator(basis))
                                    .function([](double x) { return Complex(std::sqrt(std::max(x, 0.0))); }, true);
            for (int s = 0; s < 1000; ++s) {
                const fock::PhotonVector f(random_vector(d, rng));
                const CVector psi = random_vector(basis.size(), rng);
                const double nf = f.norm(), root = (sqrt_n * psi).norm();
                worst = std::min(worst, nf * root - (fock::annihilator(basis, f) * psi).norm());
                worst = std::min(worst, nf * root + nf * psi.norm() - (fock::creator(basis, f) * psi).norm());
            }
        }
        return Outcome{worst >= -1e-12, fmt("min slack %.3e over 4000 checks", worst)};
    });

    criterion(3, "assumption certification", 60.0, [] {
        field::DiracMaxwellParams p;
        p.points_per_axis = 3;
        p.charge = std::sqrt(kAlpha);
        p.n_max = 2;
        const auto dm = assumptions::certify(field::total_hamiltonian(p).bundle);
        field::DiracKleinGordonParams k;
        k.points_per_axis = 3;
        k.coupling = 0.1;
        k.n_max = 2;
        const auto dkg = assumptions::certify(field::dkg_hamiltonian(k).bundle);
        bool ok = true;
        std::string detail;
        for (const auto* r : {&dm, &dkg}) {
            ok = ok && r->all_pass && r->cond_IV.band_width_b == 1.0 &&
                 r->cond_III.rel_bound_a <= r->cond_III.analytic_a;
            detail += r->model + fmt(": a=%.4g", r->cond_III.rel_bound_a) +
                      fmt(" <= %.4g", r->cond_III.analytic_a) + fmt(", b_band=%g; ", r->cond_IV.band_width_b);
        }
        return Outcome{ok, detail};
    });

    criterion(4, "Coulomb gate and CP invariance", 1.0, [] {
        const double q = std::sqrt(1.0 / 137.036);
        bool ok = true;
        try {
            dirac::check_coulomb_gate(68, q);
        } catch (const ThresholdError&) {
            ok = false;
        }
        bool rejected = false;
        try {
            dirac::check_coulomb_gate(69, q);
        } catch (const ThresholdError&) {
            rejected = true;
        }
        const dirac::PositionLattice lat(3, 1.0);
        const auto g = dirac::gamma_set();
        const auto c = dirac::pauli_matrix(g);
        const auto coul = dirac::cp_invariant(lat, dirac::coulomb_values(lat, 68, q), c);
        const auto zero = dirac::cp_invariant(lat, dirac::zero_potential(lat), c);
        ok = ok && rejected && coul.invariant && zero.invariant && coul.defect < 1e-12 && zero.defect < 1e-12;
        return Outcome{ok, fmt("Z=68 accepted, Z=69 rejected; CP defect Coulomb %.2e", coul.defect) +
                               fmt(", free %.2e", zero.defect)};
    });

    criterion(5, "Dyson series against the exact exponential", 30.0, [] {
        const auto run = toy_run();
        const bool ok = run.oracle.available && run.oracle.discrepancy < 1e-8;
        return Outcome{ok, fmt("discrepancy %.4e < 1e-8", run.oracle.discrepancy)};
    });

    criterion(6, "band support and margin flag", 60.0, [] {
        // Lattice bundle, one order inside the truncation.
        field::DiracMaxwellParams p;
        p.points_per_axis = 3;
        p.charge = std::sqrt(kAlpha);
        p.n_max = 2;
        const auto big = field::total_hamiltonian(p);
        const CVector xi = dyson::basis_vector(big.bundle.dim(), 0);
        dyson::RunOptions no_oracle;
        no_oracle.oracle = false;
        const dyson::DysonEngine engine(big.bundle);
        const auto inside = engine.propagate(xi, 0.5, 0.0, 1, 8, no_oracle);
        double worst = 0.0;
        for (double m : inside.out_of_band) worst = std::max(worst, m);
        bool ok = inside.trusted && inside.margin >= 1.0;

        // Single-site bundle with a deeper series, then past the margin.
        p.points_per_axis = 1;
        p.n_max = 6;
        const auto small = field::total_hamiltonian(p);
        const dyson::DysonEngine se(small.bundle);
        const CVector xs = dyson::basis_vector(small.bundle.dim(), 0);
        const auto deep = se.propagate(xs, 1.0, 0.0, 5, 8);
        for (double m : deep.out_of_band) worst = std::max(worst, m);
        const auto edge = se.propagate(xs, 1.0, 0.0, 6, 8);
        const auto past = se.propagate(xs, 1.0, 0.0, 8, 8);
        const bool json_flag = dyson::to_json(past).find("\"trusted\": false") != std::string::npos;
        ok = ok && deep.trusted && !edge.trusted && !past.trusted && past.margin < 0.0 && json_flag && worst < 1e-12;
        return Outcome{ok, fmt("max out-of-band mass %.2e; ", worst) + fmt("margins %g trusted, ", deep.margin) +
                               fmt("%g and ", edge.margin) + fmt("%g flagged untrusted", past.margin)};
    });

    criterion(7, "Schroedinger residual order", 30.0, [] {
        const auto toy = field::single_mode_toy(1.0, 0.1, 14);
        const dyson::DysonEngine engine(toy);
        const CVector xi = dyson::basis_vector(toy.dim(), 0);
        const CMatrix h = toy.total().to_dense();
        const double t = 0.5;
        auto residual = [&](double step) {
            const CVector plus = dyson::schroedinger_solution(engine, xi, t + step, 12, 16);
            const CVector minus = dyson::schroedinger_solution(engine, xi, t - step, 12, 16);
            const CVector mid = dyson::schroedinger_solution(engine, xi, t, 12, 16);
            return ((plus - minus) / (2.0 * step) + Complex(0.0, 1.0) * (h * mid)).norm();
        };
        const double order = std::log10(residual(1e-2) / residual(1e-3));
        return Outcome{order >= 1.8 && order <= 2.2, fmt("observed order %.4f", order)};
    });

    criterion(8, "unitarity proxy", 0.0, [] {
        const auto run = toy_run();
        const bool ok = run.trusted && run.oracle.norm_drift <= run.oracle.discrepancy + 1e-12;
        return Outcome{ok, fmt("drift %.3e", run.oracle.norm_drift) +
                               fmt(" <= discrepancy %.3e + 1e-12", run.oracle.discrepancy)};
    });

    criterion(9, "reproducible reports", 0.0, [] {
        const fs::path root = fs::temp_directory_path() / "fockdyson_acceptance";
        fs::remove_all(root);
        const std::string config = std::string(FOCKDYSON_CONFIG_DIR) + "/toy_single_mode.toml";
        bool ok = true;
        for (const char* dir : {"a", "b"})
            for (const char* cmd : {"certify", "propagate"})
                ok = ok && run_cli(std::string(cmd) + " --config " + config + " --seed 5 --out " +
                                   (root / dir).string()) == 0;
        if (!ok) return Outcome{false, "command line run failed"};
        auto strip = [](const std::string& text) {
            auto j = nlohmann::json::parse(text);
            j.erase("timing");
            return j.dump();
        };
        const fs::path a = root / "a", b = root / "b";
        const bool same = slurp(a / "assumption_report.json") == slurp(b / "assumption_report.json") &&
                          slurp(a / "manifest.json") == slurp(b / "manifest.json") &&
                          slurp(a / "dyson_run.csv") == slurp(b / "dyson_run.csv") &&
                          strip(slurp(a / "dyson_run.json")) == strip(slurp(b / "dyson_run.json"));
        return Outcome{same, same ? "two runs byte-identical outside the timing field" : "outputs differ"};
    });

    std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
