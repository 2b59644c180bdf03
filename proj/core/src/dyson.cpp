#include "fockdyson/dyson.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "fockdyson/assumptions.hpp"
#include "json.hpp"

namespace fockdyson::dyson {

using numerics::ComplexSparseMatrix;

namespace {

const Complex kMinusI(0.0, -1.0);

bool finite(const CVector& v) { return v.allFinite(); }

// Index of the level nearest to value.
Index nearest_level(const std::vector<double>& levels, double value) {
    const auto it = std::lower_bound(levels.begin(), levels.end(), value);
    Index k = std::clamp<Index>(it - levels.begin(), 0, static_cast<Index>(levels.size()) - 1);
    if (k > 0 && std::abs(levels[k - 1] - value) < std::abs(levels[k] - value)) --k;
    return k;
}

}  // namespace

struct DysonEngine::Grid {
    quadrature::Rule rule;
    quadrature::RMatrix s;
    std::vector<CVector> phase;  // e^{-i tau_j E} per node
};

DysonEngine::DysonEngine(const ModelBundle& bundle, const Tolerances& tol)
    : bundle_(std::make_shared<const ModelBundle>(bundle)),
      tol_(tol),
      h0_(SpectralDecomposition::compute(bundle_->h0(), tol)),
      a_(SpectralDecomposition::compute(bundle_->a(), tol)) {
    band_width_ = assumptions::check_IV(bundle_->h1(), a_, tol).band_width_b;
    n_max_ = bundle_->manifest().number("n_max").value_or(a_.max_eigenvalue());
}

void DysonEngine::check_vector(const CVector& xi) const {
    if (xi.size() != bundle_->dim()) {
        std::ostringstream msg;
        msg << "initial vector has length " << xi.size() << ", bundle dimension is " << bundle_->dim();
        throw DimensionError(msg.str());
    }
    if (!finite(xi)) throw Error("initial vector has non-finite entries");
}

double DysonEngine::initial_band(const CVector& xi) const {
    check_vector(xi);
    const double norm = xi.norm();
    if (norm == 0.0) return 0.0;
    const auto levels = a_.levels(tol_.level_grouping);
    const CVector c = a_.to_eigen(xi);
    std::vector<double> mass(levels.size(), 0.0);
    const RVector& values = a_.block_values();
    for (Index i = 0; i < c.size(); ++i) mass[nearest_level(levels, values[i])] += std::norm(c[i]);
    double band = levels.front();
    for (std::size_t k = 0; k < levels.size(); ++k)
        if (std::sqrt(mass[k]) > tol_.support * norm) band = levels[k];
    return band;
}

double DysonEngine::out_of_band_mass(const CVector& v, double band) const {
    const double norm = v.norm();
    if (norm == 0.0) return 0.0;
    const CVector c = a_.to_eigen(v);
    const RVector& values = a_.block_values();
    double outside = 0.0;
    for (Index i = 0; i < c.size(); ++i)
        if (values[i] > band + tol_.level_grouping) outside += std::norm(c[i]);
    return std::sqrt(outside) / norm;
}

DysonEngine::Grid DysonEngine::make_grid(double t, double t_prime, int m) const {
    Grid g;
    g.rule = quadrature::gauss_legendre(m, t_prime, t);
    g.s = quadrature::integration_matrix(g.rule, t_prime);
    const RVector& e = h0_.block_values();
    g.phase.resize(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        CVector p(e.size());
        for (Index i = 0; i < e.size(); ++i) p[i] = std::polar(1.0, -g.rule.nodes[j] * e[i]);
        g.phase[j] = std::move(p);
    }
    return g;
}

// e^{i tau H0} H1 e^{-i tau H0} in H0 eigen-coordinates at node j.
CVector DysonEngine::apply_generator(const Grid& g, Index node, const CVector& c) const {
    const CVector& p = g.phase[node];
    const CVector moved = h0_.from_eigen(p.cwiseProduct(c));
    const CVector hit = bundle_->h1() * moved;
    return p.conjugate().cwiseProduct(h0_.to_eigen(hit));
}

std::vector<CVector> DysonEngine::terms(const CVector& xi, double t, double t_prime, int order, int m) const {
    check_vector(xi);
    if (order < 0) throw Error("series order must be non-negative");
    if (m < 2) throw Error("quadrature needs at least 2 nodes per level, got " + std::to_string(m));
    std::vector<CVector> out;
    out.reserve(static_cast<std::size_t>(order) + 1);
    out.push_back(xi);
    if (order == 0) return out;
    if (t == t_prime) {
        for (int n = 1; n <= order; ++n) out.push_back(CVector::Zero(xi.size()));
        return out;
    }

    const Grid g = make_grid(t, t_prime, m);
    const CVector c0 = h0_.to_eigen(xi);
    std::vector<CVector> v(static_cast<std::size_t>(m), c0);  // previous level at the nodes
    std::vector<CVector> f(static_cast<std::size_t>(m));
    for (int n = 1; n <= order; ++n) {
        for (int j = 0; j < m; ++j) f[j] = apply_generator(g, j, v[j]);
        CVector tn = CVector::Zero(c0.size());
        for (int j = 0; j < m; ++j) tn += g.rule.weights[j] * f[j];
        tn *= kMinusI;
        if (!finite(tn)) {
            std::ostringstream msg;
            msg << "series term of order " << n << " is not finite";
            throw NonFiniteTermError(msg.str(), n);
        }
        out.push_back(h0_.from_eigen(tn));
        if (n == order) break;
        for (int i = 0; i < m; ++i) {
            CVector acc = CVector::Zero(c0.size());
            for (int j = 0; j < m; ++j) acc += g.s(i, j) * f[j];
            v[i] = kMinusI * acc;
        }
    }
    return out;
}

CVector DysonEngine::term(const CVector& xi, double t, double t_prime, int n, int m) const {
    return terms(xi, t, t_prime, n, m).back();
}

CVector DysonEngine::picard(const CVector& xi, double t, double t_prime, int order, int m) const {
    check_vector(xi);
    if (order < 0) throw Error("series order must be non-negative");
    if (m < 2) throw Error("quadrature needs at least 2 nodes per level, got " + std::to_string(m));
    if (order == 0 || t == t_prime) return xi;
    const Grid g = make_grid(t, t_prime, m);
    const CVector c0 = h0_.to_eigen(xi);
    std::vector<CVector> x(static_cast<std::size_t>(m), c0);
    std::vector<CVector> f(static_cast<std::size_t>(m));
    for (int k = 1; k <= order; ++k) {
        for (int j = 0; j < m; ++j) f[j] = apply_generator(g, j, x[j]);
        if (k == order) {
            CVector acc = CVector::Zero(c0.size());
            for (int j = 0; j < m; ++j) acc += g.rule.weights[j] * f[j];
            return h0_.from_eigen(c0 + kMinusI * acc);
        }
        for (int i = 0; i < m; ++i) {
            CVector acc = CVector::Zero(c0.size());
            for (int j = 0; j < m; ++j) acc += g.s(i, j) * f[j];
            x[i] = c0 + kMinusI * acc;
        }
    }
    return xi;  // not reached
}

CVector DysonEngine::propagator(const CVector& xi, double t, double t_prime, int order, int m) const {
    const auto ts = terms(xi, t, t_prime, order, m);
    CVector sum = CVector::Zero(xi.size());
    for (const auto& v : ts) sum += v;
    return sum;
}

CVector DysonEngine::free_evolution(const CVector& v, double t) const {
    if (t == 0.0) return v;
    return numerics::evolve(h0_, t, v);
}

DysonRun DysonEngine::propagate(const CVector& xi, double t, double t_prime, int order, int m,
                                const RunOptions& opts) const {
    const auto start = std::chrono::steady_clock::now();
    DysonRun run;
    run.model = bundle_->manifest().model;
    run.manifest_hash = bundle_->manifest().hash();
    run.initial = xi;
    run.t = t;
    run.t_prime = t_prime;
    run.order = order;
    run.nodes = m;
    run.seed = opts.seed;

    run.initial_band = initial_band(xi);
    run.band_width_b = band_width_;
    run.n_max = n_max_;
    run.margin = n_max_ - (run.initial_band + order * band_width_);

    run.terms = terms(xi, t, t_prime, order, m);
    run.result = CVector::Zero(xi.size());
    for (std::size_t n = 0; n < run.terms.size(); ++n) {
        run.term_norms.push_back(run.terms[n].norm());
        run.out_of_band.push_back(
            out_of_band_mass(run.terms[n], run.initial_band + static_cast<double>(n) * band_width_));
        run.result += run.terms[n];
    }
    run.unitarity_defect = std::abs(run.result.norm() - xi.norm());

    bool picard_ok = true;
    if (opts.picard_check) {
        run.picard_discrepancy = (picard(xi, t, t_prime, order, m) - run.result).norm();
        picard_ok = run.picard_discrepancy <= 1e-10;
    } else {
        run.picard_discrepancy = std::numeric_limits<double>::quiet_NaN();
    }
    // The truncation must leave one spare band above every term.
    run.trusted = run.margin >= 1.0 && picard_ok;

    if (opts.oracle) oracle_compare(*this, run);
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return run;
}

// ---------------------------------------------------------------------------

ComplexSparseMatrix interaction_generator(const ModelBundle& bundle, double t, const Tolerances& tol) {
    if (t == 0.0) return bundle.h1();
    const auto spec = SpectralDecomposition::compute(bundle.h0(), tol);
    const auto u = spec.function([t](double e) { return std::polar(1.0, -t * e); }, false);
    const SparseStorage conj = u.storage().adjoint();
    SparseStorage m = conj * (bundle.h1().storage() * u.storage());
    const SparseStorage mh = m.adjoint();
    SparseStorage sym = 0.5 * (m + mh);
    return ComplexSparseMatrix(std::move(sym), true, tol);
}

CVector dyson_term(const ModelBundle& bundle, const CVector& xi, double t, double t_prime, int n, int m) {
    if (m < 2) throw Error("quadrature needs at least 2 nodes per level, got " + std::to_string(m));
    return DysonEngine(bundle).term(xi, t, t_prime, n, m);
}

DysonRun dyson_propagate(const ModelBundle& bundle, const CVector& xi, double t, double t_prime, int order,
                         int m, const RunOptions& opts) {
    return DysonEngine(bundle).propagate(xi, t, t_prime, order, m, opts);
}

CVector schroedinger_solution(const DysonEngine& engine, const CVector& xi, double t, int order, int m) {
    if (t == 0.0) return xi;
    return engine.free_evolution(engine.propagator(xi, t, 0.0, order, m), t);
}

CVector schroedinger_solution(const ModelBundle& bundle, const CVector& xi, double t, int order, int m) {
    return schroedinger_solution(DysonEngine(bundle), xi, t, order, m);
}

OracleReport oracle_compare(const DysonEngine& engine, DysonRun& run) {
    OracleReport rep;
    const auto& bundle = engine.bundle();
    std::optional<SpectralDecomposition> h;
    try {
        h = SpectralDecomposition::compute(bundle.total());
    } catch (const SizeLimitError& e) {
        rep.reason = e.what();
        run.oracle = rep;
        return rep;
    }
    const CVector exact = numerics::evolve(*h, run.t - run.t_prime, engine.free_evolution(run.initial, run.t_prime));
    CVector partial = CVector::Zero(run.initial.size());
    for (const auto& term : run.terms) {
        partial += term;
        rep.partial_discrepancy.push_back((engine.free_evolution(partial, run.t) - exact).norm());
    }
    const CVector approx = engine.free_evolution(run.result, run.t);
    rep.available = true;
    rep.discrepancy = (approx - exact).norm();
    rep.norm_drift = std::abs(approx.norm() - run.initial.norm());
    run.oracle = rep;
    return rep;
}

double cocycle_check(const DysonEngine& engine, const CVector& xi, double t_pp, double t_p, double t, int order,
                     int m) {
    const CVector inner = engine.propagator(xi, t_p, t_pp, order, m);
    const CVector composed = engine.propagator(inner, t, t_p, order, m);
    const CVector direct = engine.propagator(xi, t, t_pp, order, m);
    return (composed - direct).norm();
}

CVector basis_vector(Index dim, Index i) {
    if (i < 0 || i >= dim) throw DimensionError("basis index out of range");
    CVector v = CVector::Zero(dim);
    v[i] = 1.0;
    return v;
}

std::string to_json(const DysonRun& run) {
    using nlohmann::json;
    json j;
    j["model"] = run.model;
    j["manifest_hash"] = run.manifest_hash;
    j["seed"] = run.seed;
    j["t"] = run.t;
    j["t_prime"] = run.t_prime;
    j["order"] = run.order;
    j["nodes_per_level"] = run.nodes;
    j["initial_norm"] = run.initial.norm();
    j["initial_band"] = run.initial_band;
    j["band_width_b"] = run.band_width_b;
    j["n_max"] = run.n_max;
    j["margin"] = run.margin;
    j["trusted"] = run.trusted;
    j["term_norms"] = run.term_norms;
    j["out_of_band_mass"] = run.out_of_band;
    j["result_norm"] = run.result.norm();
    j["unitarity_defect"] = run.unitarity_defect;
    j["picard_discrepancy"] = run.picard_discrepancy;
    j["oracle"] = {{"available", run.oracle.available}};
    if (run.oracle.available) {
        j["oracle"]["discrepancy"] = run.oracle.discrepancy;
        j["oracle"]["norm_drift"] = run.oracle.norm_drift;
        j["oracle"]["partial_sum_discrepancy"] = run.oracle.partial_discrepancy;
    } else {
        j["oracle"]["reason"] = run.oracle.reason;
    }
    j["timing"] = {{"seconds", run.seconds}};
    return j.dump(2);
}

std::string to_csv(const DysonRun& run) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "order,term_norm,partial_sum_discrepancy,out_of_band_mass\n";
    for (std::size_t n = 0; n < run.term_norms.size(); ++n) {
        out << n << ',' << run.term_norms[n] << ',';
        if (run.oracle.available) out << run.oracle.partial_discrepancy[n];
        out << ',' << run.out_of_band[n] << '\n';
    }
    return out.str();
}

}  // namespace fockdyson::dyson
