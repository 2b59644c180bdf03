// quadrature.hpp: Gauss-Legendre rules and the matching collocation integral.

#pragma once

#include "fockdyson/numerics.hpp"

namespace fockdyson::quadrature {

using RMatrix = Eigen::MatrixXd;

struct Rule {
    RVector nodes;
    RVector weights;
};

// m-point Gauss-Legendre rule on [a, b] (b < a gives negated weights).
// Throws Error for m < 2.
Rule gauss_legendre(int m, double a, double b);

// S(i, j) = integral from a to nodes[i] of the j-th Lagrange basis polynomial
// through the rule's nodes, evaluated with the same number of GL points on
// each sub-interval (exact, the basis has degree m - 1).
RMatrix integration_matrix(const Rule& rule, double a);

}  // namespace fockdyson::quadrature
