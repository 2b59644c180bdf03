// dyson.hpp: time-ordered series for the interaction-picture propagator
//
//   U(t, t') xi = sum_n (-i)^n  int_{t' <= tau_n <= ... <= tau_1 <= t}
//                               H1(tau_1) ... H1(tau_n) xi,
//   H1(tau) = e^{i tau H0} H1 e^{-i tau H0},
//
// evaluated with an m-node Gauss-Legendre collocation per nesting level. All
// vectors are carried in the eigen-coordinates of H0, where the free evolution
// is a diagonal phase.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fockdyson/bundle.hpp"
#include "fockdyson/numerics.hpp"
#include "fockdyson/quadrature.hpp"

namespace fockdyson::dyson {

using numerics::SpectralDecomposition;
using numerics::Tolerances;

// A series term became NaN or infinite; `order()` is the offending order.
class NonFiniteTermError : public Error {
public:
    NonFiniteTermError(const std::string& what, int order) : Error(what), order_(order) {}
    int order() const noexcept { return order_; }

private:
    int order_;
};

struct OracleReport {
    bool available = false;
    std::string reason;                      // why not, when unavailable
    double discrepancy = 0.0;                // ||e^{-i(t-t')H} e^{-it'H0} xi - e^{-itH0} U(t,t') xi||
    double norm_drift = 0.0;                 // | ||e^{-itH0} U xi|| - ||xi|| |
    std::vector<double> partial_discrepancy; // same, for the partial sums up to each order
};

struct DysonRun {
    std::string model;
    std::string manifest_hash;
    CVector initial;
    double t = 0.0;
    double t_prime = 0.0;
    int order = 0;
    int nodes = 0;

    double initial_band = 0.0;   // L0: highest A-level carrying weight in xi
    double band_width_b = 0.0;
    double n_max = 0.0;
    double margin = 0.0;         // n_max - (L0 + order * b)
    bool trusted = false;

    std::vector<CVector> terms;          // term n, original coordinates
    std::vector<double> term_norms;
    std::vector<double> out_of_band;     // relative mass of term n above band L0 + n b
    CVector result;                      // U(t, t') xi
    double unitarity_defect = 0.0;       // | ||U xi|| - ||xi|| |
    double picard_discrepancy = 0.0;     // vs Picard accumulation; NaN when skipped
    OracleReport oracle;

    std::uint64_t seed = 0;
    double seconds = 0.0;
};

struct RunOptions {
    bool picard_check = true;
    bool oracle = true;
    std::uint64_t seed = 0;
};

// Caches what every run on one bundle shares: the decompositions of H0 and A,
// the band width of H1 and the truncation level.
class DysonEngine {
public:
    explicit DysonEngine(const ModelBundle& bundle, const Tolerances& tol = numerics::default_tolerances());

    const ModelBundle& bundle() const noexcept { return *bundle_; }
    const SpectralDecomposition& h0_spectrum() const noexcept { return h0_; }
    const SpectralDecomposition& a_spectrum() const noexcept { return a_; }
    double band_width() const noexcept { return band_width_; }
    double n_max() const noexcept { return n_max_; }

    // Highest A-level whose component of xi exceeds tol.support * ||xi||.
    double initial_band(const CVector& xi) const;
    // Mass of v above A-level `band`, relative to ||v|| (0 for v = 0).
    double out_of_band_mass(const CVector& v, double band) const;

    // Terms 0..order of U(t, t') xi, original coordinates. m >= 2.
    std::vector<CVector> terms(const CVector& xi, double t, double t_prime, int order, int m) const;
    CVector term(const CVector& xi, double t, double t_prime, int n, int m) const;
    // Partial sum through `order` by Picard iteration on the same nodes.
    CVector picard(const CVector& xi, double t, double t_prime, int order, int m) const;
    CVector propagator(const CVector& xi, double t, double t_prime, int order, int m) const;

    DysonRun propagate(const CVector& xi, double t, double t_prime, int order, int m,
                       const RunOptions& opts = {}) const;

    // e^{-it H0} v.
    CVector free_evolution(const CVector& v, double t) const;

private:
    struct Grid;
    Grid make_grid(double t, double t_prime, int m) const;
    CVector apply_generator(const Grid& g, Index node, const CVector& c) const;
    void check_vector(const CVector& xi) const;

    std::shared_ptr<const ModelBundle> bundle_;
    Tolerances tol_;
    SpectralDecomposition h0_;
    SpectralDecomposition a_;
    double band_width_ = 0.0;
    double n_max_ = 0.0;
};

// H1(t) = e^{itH0} H1 e^{-itH0}, symmetrised and flagged Hermitian. H1(0) is H1.
numerics::ComplexSparseMatrix interaction_generator(const ModelBundle& bundle, double t,
                                                    const Tolerances& tol = numerics::default_tolerances());

CVector dyson_term(const ModelBundle& bundle, const CVector& xi, double t, double t_prime, int n, int m);
DysonRun dyson_propagate(const ModelBundle& bundle, const CVector& xi, double t, double t_prime,
                         int order, int m, const RunOptions& opts = {});

// xi(t) = e^{-itH0} U(t, 0) xi.
CVector schroedinger_solution(const ModelBundle& bundle, const CVector& xi, double t, int order, int m);
CVector schroedinger_solution(const DysonEngine& engine, const CVector& xi, double t, int order, int m);

// Dense comparison with the exact propagator; fills and returns run.oracle.
OracleReport oracle_compare(const DysonEngine& engine, DysonRun& run);

// || U(t, t') U(t', t'') xi - U(t, t'') xi ||.
double cocycle_check(const DysonEngine& engine, const CVector& xi, double t_pp, double t_p, double t,
                     int order, int m);

// Unit vector e_i; e_0 is the vacuum of every model built by this library.
CVector basis_vector(Index dim, Index i);

std::string to_json(const DysonRun& run);
// order, term_norm, partial_sum_discrepancy, out_of_band_mass
std::string to_csv(const DysonRun& run);

}  // namespace fockdyson::dyson
