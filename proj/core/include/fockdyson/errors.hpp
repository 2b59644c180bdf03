#pragma once

#include <stdexcept>
#include <string>

namespace fockdyson {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operand shapes do not match (matrix dims, vector lengths, grids).
class DimensionError : public Error {
public:
    using Error::Error;
};

// A matrix declared or required to be Hermitian is not.
class NotHermitianError : public Error {
public:
    NotHermitianError(const std::string& what, double max_asymmetry)
        : Error(what), max_asymmetry_(max_asymmetry) {}
    double max_asymmetry() const noexcept { return max_asymmetry_; }

private:
    double max_asymmetry_;
};

// A physical admissibility gate rejected its input (e.g. Z q^2 >= 1/2).
class ThresholdError : public Error {
public:
    using Error::Error;
};

// A requested object would exceed a configured size limit.
class SizeLimitError : public Error {
public:
    SizeLimitError(const std::string& what, double estimated_size)
        : Error(what), estimated_size_(estimated_size) {}
    double estimated_size() const noexcept { return estimated_size_; }

private:
    double estimated_size_;
};

// Malformed input files or configuration.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace fockdyson
