// assumptions.hpp: finite-truncation certificate for the four structural
// conditions on (H0, H1, A):
//   I   A is self-adjoint and non-negative
//   II  A and H0 strongly commute
//   III H1 is A^{1/2}-bounded: ||H1 x|| <= a ||A^{1/2} x|| + b ||x||
//   IV  H1 maps ran E_A([0, L]) into ran E_A([0, L + b]) for every L
//
// At finite dimension strong commutation is checked as matrix commutation plus
// commutation of every spectral projection of A with H0; the two notions
// coincide for bounded operators.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fockdyson/bundle.hpp"
#include "fockdyson/numerics.hpp"

namespace fockdyson::assumptions {

using numerics::SpectralDecomposition;
using numerics::Tolerances;

struct ConditionI {
    bool pass = false;
    double hermitian_defect = 0.0;
    double min_eigenvalue = 0.0;
};

struct ConditionII {
    bool pass = false;
    double commutator = 0.0;             // max |[A, H0]_ij|
    double projection_commutator = 0.0;  // max over levels of max |[E_A({l}), H0]_ij|
    Index levels = 0;
};

struct ConditionIII {
    bool pass = false;
    double rel_bound_a = 0.0;
    double rel_bound_b = 0.0;
    double analytic_a = 0.0;
    double analytic_b = 0.0;
    std::string analytic_source;    // "manifest" or "band_norm"
    double analytic_min_slack = 0.0;  // min over samples of a_an u + b_an w - ||H1 x||
    Index random_samples = 0;
    Index basis_samples = 0;
    Index blocks = 0;
};

struct ConditionIV {
    bool pass = false;
    double band_width_b = 0.0;
    double residual = 0.0;  // Frobenius bound on ||(1 - E_A([0,L+b])) H1 E_A([0,L])|| over L
    std::string note;
};

struct AssumptionReport {
    ConditionI cond_I;
    ConditionII cond_II;
    ConditionIII cond_III;
    ConditionIV cond_IV;
    bool all_pass = false;
    std::uint64_t seed = 0;
    std::string manifest_hash;
    std::string model;
    std::vector<std::string> notes;
};

struct SamplingOptions {
    std::uint64_t seed = 20240601;
    Index samples = 10'000;
    Index grid_steps = 1000;  // resolution of the (a, b) search grid
};

ConditionI check_I(const numerics::ComplexSparseMatrix& a, const Tolerances& tol = numerics::default_tolerances());
ConditionI check_I(const numerics::ComplexSparseMatrix& a, const SpectralDecomposition& a_spec,
                   const Tolerances& tol = numerics::default_tolerances());

ConditionII check_II(const numerics::ComplexSparseMatrix& a, const numerics::ComplexSparseMatrix& h0,
                     const Tolerances& tol = numerics::default_tolerances());
ConditionII check_II(const numerics::ComplexSparseMatrix& a, const SpectralDecomposition& a_spec,
                     const numerics::ComplexSparseMatrix& h0,
                     const Tolerances& tol = numerics::default_tolerances());

// `coupling_norm_sum` S gives the analytic pair (2S, S); without it the pair is
// derived from the lowest band block, 2 sqrt(2) ||P1 H1 P0|| and sqrt(2) ||P1 H1 P0||.
// Throws Error if A has a negative eigenvalue.
ConditionIII check_III(const numerics::ComplexSparseMatrix& h1, const numerics::ComplexSparseMatrix& a,
                       std::optional<double> coupling_norm_sum, const SamplingOptions& opts = {},
                       const Tolerances& tol = numerics::default_tolerances());
ConditionIII check_III(const numerics::ComplexSparseMatrix& h1, const numerics::ComplexSparseMatrix& a,
                       const SpectralDecomposition& a_spec, std::optional<double> coupling_norm_sum,
                       const SamplingOptions& opts = {},
                       const Tolerances& tol = numerics::default_tolerances());

// Analytic pair from the vacuum-to-first-band block of H1.
std::pair<double, double> analytic_from_band_norm(const numerics::ComplexSparseMatrix& h1,
                                                  const SpectralDecomposition& a_spec,
                                                  const Tolerances& tol = numerics::default_tolerances());

ConditionIV check_IV(const numerics::ComplexSparseMatrix& h1, const numerics::ComplexSparseMatrix& a,
                     const Tolerances& tol = numerics::default_tolerances());
ConditionIV check_IV(const numerics::ComplexSparseMatrix& h1, const SpectralDecomposition& a_spec,
                     const Tolerances& tol = numerics::default_tolerances());

AssumptionReport certify(const ModelBundle& bundle, const SamplingOptions& opts = {},
                         const Tolerances& tol = numerics::default_tolerances());

std::string to_json(const AssumptionReport& report);

}  // namespace fockdyson::assumptions
