#include "fockdyson/quadrature.hpp"

#include <memory>
#include <string>

#include <gsl/gsl_integration.h>

namespace fockdyson::quadrature {

namespace {

struct TableDeleter {
    void operator()(gsl_integration_glfixed_table* t) const { gsl_integration_glfixed_table_free(t); }
};

// Value of every Lagrange basis polynomial through `nodes` at x.
RVector lagrange_basis(const RVector& nodes, double x) {
    const Index m = nodes.size();
    RVector out(m);
    for (Index j = 0; j < m; ++j) {
        double v = 1.0;
        for (Index k = 0; k < m; ++k)
            if (k != j) v *= (x - nodes[k]) / (nodes[j] - nodes[k]);
        out[j] = v;
    }
    return out;
}

}  // namespace

Rule gauss_legendre(int m, double a, double b) {
    if (m < 2) throw Error("Gauss-Legendre rule needs at least 2 nodes, got " + std::to_string(m));
    std::unique_ptr<gsl_integration_glfixed_table, TableDeleter> table(
        gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(m)));
    if (!table) throw Error("cannot allocate Gauss-Legendre table");
    Rule r{RVector(m), RVector(m)};
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < m; ++i) {
        double x = 0.0, w = 0.0;
        gsl_integration_glfixed_point(-1.0, 1.0, static_cast<std::size_t>(i), &x, &w, table.get());
        r.nodes[i] = mid + half * x;
        r.weights[i] = half * w;
    }
    return r;
}

RMatrix integration_matrix(const Rule& rule, double a) {
    const Index m = rule.nodes.size();
    RMatrix s = RMatrix::Zero(m, m);
    for (Index i = 0; i < m; ++i) {
        const Rule inner = gauss_legendre(static_cast<int>(m), a, rule.nodes[i]);
        for (Index k = 0; k < m; ++k) s.row(i) += inner.weights[k] * lagrange_basis(rule.nodes, inner.nodes[k]).transpose();
    }
    return s;
}

}  // namespace fockdyson::quadrature
