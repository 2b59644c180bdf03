// bundle.hpp: the (H0, H1, A) triple that defines one experiment.

#pragma once

#include <map>
#include <optional>
#include <string>

#include "fockdyson/numerics.hpp"

namespace fockdyson {

using numerics::ComplexSparseMatrix;

// Descriptive metadata carried alongside the operators. Numeric entries include
// at least `n_max`; model builders also record `coupling_norm_sum`, the
// constant S for which the analytic relative bound is (2 S, S).
struct Manifest {
    std::string model;
    std::map<std::string, double> numbers;
    std::map<std::string, std::string> labels;

    std::optional<double> number(const std::string& key) const;
    // Canonical JSON text (sorted keys, fixed precision).
    std::string to_json() const;
    static Manifest from_json(const std::string& text);
    // SHA-256 of to_json(), lowercase hex.
    std::string hash() const;
};

class ModelBundle {
public:
    // Throws DimensionError on mismatched dims, NotHermitianError if any of the
    // three operators is not flagged Hermitian.
    ModelBundle(ComplexSparseMatrix h0, ComplexSparseMatrix h1, ComplexSparseMatrix a,
                Manifest manifest);

    const ComplexSparseMatrix& h0() const noexcept { return h0_; }
    const ComplexSparseMatrix& h1() const noexcept { return h1_; }
    const ComplexSparseMatrix& a() const noexcept { return a_; }
    const Manifest& manifest() const noexcept { return manifest_; }
    Index dim() const noexcept { return h0_.dim(); }

    // H = H0 + H1.
    ComplexSparseMatrix total() const { return h0_ + h1_; }

private:
    ComplexSparseMatrix h0_;
    ComplexSparseMatrix h1_;
    ComplexSparseMatrix a_;
    Manifest manifest_;
};

// Directory layout: H0.mtx, H1.mtx, A.mtx (coordinate format) and manifest.json.
void write_bundle(const std::string& directory, const ModelBundle& bundle);
ModelBundle read_bundle(const std::string& directory);

}  // namespace fockdyson
