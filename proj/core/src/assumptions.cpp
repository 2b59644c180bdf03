#include "fockdyson/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "json.hpp"

namespace fockdyson::assumptions {

using numerics::ComplexSparseMatrix;

namespace {

ComplexSparseMatrix as_hermitian(const ComplexSparseMatrix& m, const Tolerances& tol) {
    if (m.hermitian()) return m;
    return ComplexSparseMatrix(m.storage(), true, tol);
}

// Restriction of m to an index set that m leaves invariant. `local` maps global
// indices to positions in `support` (or -1) and is left as it was found.
SparseStorage restrict_to(const SparseStorage& m, const std::vector<Index>& support,
                          std::vector<Index>& local) {
    const Index n = static_cast<Index>(support.size());
    for (Index i = 0; i < n; ++i) local[support[i]] = i;
    std::vector<Triplet> t;
    for (Index j = 0; j < n; ++j)
        for (SparseStorage::InnerIterator it(m, support[j]); it; ++it)
            if (local[it.row()] >= 0) t.emplace_back(local[it.row()], j, it.value());
    for (Index i = 0; i < n; ++i) local[support[i]] = -1;
    SparseStorage out(n, n);
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

// Largest singular value by power iteration on M^dagger M.
double operator_norm(const SparseStorage& m) {
    if (m.nonZeros() == 0) return 0.0;
    std::mt19937_64 rng(1);
    std::normal_distribution<double> normal;
    CVector v(m.cols());
    for (Index i = 0; i < v.size(); ++i) v[i] = Complex(normal(rng), normal(rng));
    v.normalize();
    const SparseStorage mh = m.adjoint();
    double sigma = 0.0;
    for (int it = 0; it < 2000; ++it) {
        CVector w = mh * (m * v);
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        const double next = std::sqrt(norm);
        v = w / norm;
        if (std::abs(next - sigma) <= 1e-15 * next) return next;
        sigma = next;
    }
    return sigma;
}

// Index of the level containing value (levels ascending, grouping as used to build them).
Index level_index(const std::vector<double>& levels, double value) {
    const auto it = std::lower_bound(levels.begin(), levels.end(), value);
    Index best = std::clamp<Index>(it - levels.begin(), 0, static_cast<Index>(levels.size()) - 1);
    if (best > 0 && std::abs(levels[best - 1] - value) < std::abs(levels[best] - value)) --best;
    return best;
}

struct Sample {
    double y;  // ||H1 x||
    double u;  // ||A^{1/2} x||
    double w;  // ||x||
};

}  // namespace

// ---------------------------------------------------------------------------

ConditionI check_I(const ComplexSparseMatrix& a, const Tolerances& tol) {
    ConditionI out;
    out.hermitian_defect = numerics::hermitian_defect(a.storage());
    if (!(out.hermitian_defect < tol.hermitian)) {
        out.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    const auto spec = SpectralDecomposition::compute(as_hermitian(a, tol), tol);
    return check_I(a, spec, tol);
}

ConditionI check_I(const ComplexSparseMatrix& a, const SpectralDecomposition& a_spec,
                   const Tolerances& tol) {
    ConditionI out;
    out.hermitian_defect = numerics::hermitian_defect(a.storage());
    out.min_eigenvalue = a_spec.min_eigenvalue();
    out.pass = out.hermitian_defect < tol.hermitian && out.min_eigenvalue >= -tol.nonnegativity;
    return out;
}

ConditionII check_II(const ComplexSparseMatrix& a, const ComplexSparseMatrix& h0, const Tolerances& tol) {
    const auto spec = SpectralDecomposition::compute(as_hermitian(a, tol), tol);
    return check_II(a, spec, h0, tol);
}

ConditionII check_II(const ComplexSparseMatrix& a, const SpectralDecomposition& a_spec,
                     const ComplexSparseMatrix& h0, const Tolerances& tol) {
    if (a.dim() != h0.dim()) throw DimensionError("check_II: A and H0 have different dimensions");
    ConditionII out;
    out.commutator = numerics::commutator_max(a, h0);
    const auto levels = a_spec.levels(tol.level_grouping);
    out.levels = static_cast<Index>(levels.size());
    // Isolate each level by the midpoints to its neighbours.
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const double lo = k == 0 ? levels[k] - 1.0 : 0.5 * (levels[k - 1] + levels[k]);
        const double hi = k + 1 == levels.size() ? levels[k] + 1.0 : 0.5 * (levels[k] + levels[k + 1]);
        const auto p = numerics::spectral_projection(a_spec, lo, hi, tol);
        out.projection_commutator =
            std::max(out.projection_commutator, numerics::commutator_max(p.matrix, h0));
    }
    out.pass = out.commutator < tol.commutator && out.projection_commutator < tol.projection_commutator;
    return out;
}

std::pair<double, double> analytic_from_band_norm(const ComplexSparseMatrix& h1,
                                                  const SpectralDecomposition& a_spec,
                                                  const Tolerances& tol) {
    const auto levels = a_spec.levels(tol.level_grouping);
    if (levels.size() < 2) return {0.0, 0.0};
    const double mid01 = 0.5 * (levels[0] + levels[1]);
    const double hi1 = levels.size() > 2 ? 0.5 * (levels[1] + levels[2]) : levels[1] + 1.0;
    const auto p0 = numerics::spectral_projection(a_spec, levels[0] - 1.0, mid01, tol);
    const auto p1 = numerics::spectral_projection(a_spec, mid01, hi1, tol);
    const SparseStorage block = p1.matrix.storage() * h1.storage() * p0.matrix.storage();
    const double norm = operator_norm(block);
    return {2.0 * std::sqrt(2.0) * norm, std::sqrt(2.0) * norm};
}

ConditionIII check_III(const ComplexSparseMatrix& h1, const ComplexSparseMatrix& a,
                       std::optional<double> coupling_norm_sum, const SamplingOptions& opts,
                       const Tolerances& tol) {
    const auto spec = SpectralDecomposition::compute(as_hermitian(a, tol), tol);
    return check_III(h1, a, spec, coupling_norm_sum, opts, tol);
}

ConditionIII check_III(const ComplexSparseMatrix& h1, const ComplexSparseMatrix& a,
                       const SpectralDecomposition& a_spec, std::optional<double> coupling_norm_sum,
                       const SamplingOptions& opts, const Tolerances& tol) {
    if (h1.dim() != a.dim()) throw DimensionError("check_III: H1 and A have different dimensions");
    if (a_spec.min_eigenvalue() < -tol.nonnegativity) {
        std::ostringstream msg;
        msg << "check_III: A has eigenvalue " << a_spec.min_eigenvalue()
            << " < 0, so A^{1/2} is undefined";
        throw Error(msg.str());
    }
    if (opts.samples < 0 || opts.grid_steps < 1) throw Error("check_III: invalid sampling options");

    ConditionIII out;
    if (coupling_norm_sum) {
        const double s = std::abs(*coupling_norm_sum);
        out.analytic_a = 2.0 * s;
        out.analytic_b = s;
        out.analytic_source = "manifest";
    } else {
        std::tie(out.analytic_a, out.analytic_b) = analytic_from_band_norm(h1, a_spec, tol);
        out.analytic_source = "band_norm";
    }

    const Index dim = a.dim();
    const auto sqrt_a = a_spec.function([](double x) { return Complex(std::sqrt(std::max(x, 0.0))); }, true);
    const SparseStorage& h = h1.storage();
    const SparseStorage& r = sqrt_a.storage();

    std::vector<Sample> samples;
    samples.reserve(static_cast<std::size_t>(opts.samples + dim));

    // Every basis vector: column norms.
    for (Index j = 0; j < dim; ++j) {
        double y2 = 0.0, u2 = 0.0;
        for (SparseStorage::InnerIterator it(h, j); it; ++it) y2 += std::norm(it.value());
        for (SparseStorage::InnerIterator it(r, j); it; ++it) u2 += std::norm(it.value());
        samples.push_back({std::sqrt(y2), std::sqrt(u2), 1.0});
    }
    out.basis_samples = dim;

    // Random vectors, one invariant block of (H1, A) at a time. Half of them are
    // tilted towards low (or high) A-values to probe both constants.
    const SparseStorage* pair[] = {&h, &a.storage()};
    const auto components = numerics::connected_components(pair, dim);
    out.blocks = static_cast<Index>(components.size());
    std::vector<Index> local(static_cast<std::size_t>(dim), -1);
    std::vector<SparseStorage> h_blocks, r_blocks;
    std::vector<RVector> a_diag;
    h_blocks.reserve(components.size());
    r_blocks.reserve(components.size());
    for (const auto& support : components) {
        h_blocks.push_back(restrict_to(h, support, local));
        r_blocks.push_back(restrict_to(r, support, local));
        RVector d(static_cast<Index>(support.size()));
        for (Index i = 0; i < d.size(); ++i) d[i] = std::max(a.storage().coeff(support[i], support[i]).real(), 0.0);
        a_diag.push_back(std::move(d));
    }

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> tilt(-4.0, 1.0);
    const std::size_t n_blocks = components.size();
    for (Index s = 0; s < opts.samples && n_blocks > 0; ++s) {
        const std::size_t c = static_cast<std::size_t>(s) % n_blocks;
        const Index n = static_cast<Index>(components[c].size());
        CVector x(n);
        for (Index i = 0; i < n; ++i) x[i] = Complex(normal(rng), normal(rng));
        if (s % 2 == 1) {
            const double kappa = tilt(rng);
            for (Index i = 0; i < n; ++i) x[i] *= std::pow(1.0 + a_diag[c][i], kappa);
        }
        const CVector hx = h_blocks[c] * x;
        const CVector rx = r_blocks[c] * x;
        samples.push_back({hx.norm(), rx.norm(), x.norm()});
    }
    out.random_samples = opts.samples;

    out.analytic_min_slack = std::numeric_limits<double>::infinity();
    for (const auto& s : samples)
        out.analytic_min_slack =
            std::min(out.analytic_min_slack, out.analytic_a * s.u + out.analytic_b * s.w - s.y);

    // Rounding allowance on each inequality.
    const auto eps = [](const Sample& s) { return 1e-12 * std::max(1.0, s.y); };

    if (out.analytic_a <= 0.0 && out.analytic_b <= 0.0) {
        double b = 0.0;
        for (const auto& s : samples)
            if (s.w > 0.0 && s.y > eps(s)) b = std::max(b, s.y / s.w);
        out.rel_bound_a = 0.0;
        out.rel_bound_b = b;
        out.pass = b == 0.0;
        return out;
    }

    // Smallest a on the grid with b fixed at the analytic b, then the smallest b.
    const double b_cap = out.analytic_b;
    double a_need = 0.0;
    bool feasible = true;
    for (const auto& s : samples) {
        const double excess = s.y - b_cap * s.w;
        if (excess <= eps(s)) continue;
        if (s.u > 0.0)
            a_need = std::max(a_need, excess / s.u);
        else
            feasible = false;
    }
    const double da = out.analytic_a / static_cast<double>(opts.grid_steps);
    const double a_grid = da > 0.0 ? std::ceil(a_need / da - 1e-9) * da : a_need;
    double b_need = 0.0;
    for (const auto& s : samples)
        if (s.w > 0.0) b_need = std::max(b_need, (s.y - a_grid * s.u - eps(s)) / s.w);
    const double db = b_cap / static_cast<double>(opts.grid_steps);
    double b = db > 0.0 ? std::ceil(b_need / db - 1e-9) * db : b_need;
    b = std::clamp(b, 0.0, b_cap);

    out.rel_bound_a = a_grid > 0.0 ? a_grid : 0.0;
    out.rel_bound_b = b;
    out.pass = feasible && out.rel_bound_a <= out.analytic_a + 1e-9;
    return out;
}

ConditionIV check_IV(const ComplexSparseMatrix& h1, const ComplexSparseMatrix& a, const Tolerances& tol) {
    const auto spec = SpectralDecomposition::compute(as_hermitian(a, tol), tol);
    return check_IV(h1, spec, tol);
}

ConditionIV check_IV(const ComplexSparseMatrix& h1, const SpectralDecomposition& a_spec,
                     const Tolerances& tol) {
    if (h1.dim() != a_spec.dim()) throw DimensionError("check_IV: H1 and A have different dimensions");
    const Index dim = h1.dim();

    // H1 in the eigenbasis of A.
    std::vector<Triplet> wt;
    Index offset = 0;
    for (const auto& b : a_spec.blocks()) {
        const Index n = static_cast<Index>(b.support.size());
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < n; ++i)
                if (b.vectors(i, j) != Complex(0.0)) wt.emplace_back(b.support[i], offset + j, b.vectors(i, j));
        offset += n;
    }
    SparseStorage w(dim, dim);
    w.setFromTriplets(wt.begin(), wt.end());
    const SparseStorage wh = w.adjoint();
    const SparseStorage tilde = wh * (h1.storage() * w);

    const auto levels = a_spec.levels(tol.level_grouping);
    const RVector& values = a_spec.block_values();
    std::vector<Index> level_of(static_cast<std::size_t>(dim));
    for (Index i = 0; i < dim; ++i) level_of[i] = level_index(levels, values[i]);

    // (source level, target level, |entry|^2) for entries that raise the level.
    struct Jump {
        Index from, to;
        double weight;
    };
    std::vector<Jump> jumps;
    std::vector<double> candidates{0.0};
    for (Index k = 0; k < tilde.outerSize(); ++k)
        for (SparseStorage::InnerIterator it(tilde, k); it; ++it) {
            const Index from = level_of[it.col()];
            const Index to = level_of[it.row()];
            if (to <= from) continue;
            jumps.push_back({from, to, std::norm(it.value())});
            candidates.push_back(levels[to] - levels[from]);
        }
    std::sort(candidates.begin(), candidates.end());
    std::vector<double> distinct;
    for (double c : candidates)
        if (distinct.empty() || c - distinct.back() > tol.level_grouping) distinct.push_back(c);

    // Frobenius norm of (1 - E([0, L+b])) H1 E([0, L]), maximised over levels L.
    const auto residual = [&](double b) {
        std::vector<double> leak(levels.size(), 0.0);
        for (const auto& j : jumps)
            for (Index l = j.from; l < j.to; ++l)
                if (levels[j.to] > levels[l] + b + tol.level_grouping) leak[l] += j.weight;
        double worst = 0.0;
        for (double v : leak) worst = std::max(worst, v);
        return std::sqrt(worst);
    };

    // The residual is non-increasing in b; bisect over the candidate jumps.
    std::size_t lo = 0, hi = distinct.size() - 1;
    if (residual(distinct[hi]) > tol.band_residual) {
        ConditionIV out;
        out.band_width_b = distinct[hi];
        out.residual = residual(distinct[hi]);
        out.note = "no candidate band width met the residual tolerance";
        return out;
    }
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (residual(distinct[mid]) <= tol.band_residual)
            hi = mid;
        else
            lo = mid + 1;
    }
    ConditionIV out;
    out.band_width_b = distinct[lo];
    out.residual = residual(out.band_width_b);
    out.pass = true;
    if (out.band_width_b == 0.0)
        out.note = "H1 preserves every spectral band of A; b = 0 reported, and any b > 0 also certifies";
    return out;
}

AssumptionReport certify(const ModelBundle& bundle, const SamplingOptions& opts, const Tolerances& tol) {
    AssumptionReport report;
    report.seed = opts.seed;
    report.model = bundle.manifest().model;
    report.manifest_hash = bundle.manifest().hash();

    const auto a_spec = SpectralDecomposition::compute(bundle.a(), tol);
    report.cond_I = check_I(bundle.a(), a_spec, tol);
    report.cond_II = check_II(bundle.a(), a_spec, bundle.h0(), tol);
    if (report.cond_I.pass) {
        report.cond_III =
            check_III(bundle.h1(), bundle.a(), a_spec, bundle.manifest().number("coupling_norm_sum"), opts, tol);
    } else {
        report.notes.push_back("condition III skipped: A is not non-negative, so A^{1/2} is undefined");
    }
    report.cond_IV = check_IV(bundle.h1(), a_spec, tol);

    report.notes.push_back(
        "strong commutation of A and H0 checked as matrix commutation plus commutation of every spectral "
        "projection of A with H0; the notions coincide for bounded operators");
    report.notes.push_back(
        "the core condition on D(H0) intersected with the band domain is vacuous at finite dimension");
    if (report.cond_I.pass)
        report.notes.push_back("relative bound sampled per invariant block of (H1, A), plus every basis vector");
    if (!report.cond_IV.note.empty()) report.notes.push_back(report.cond_IV.note);

    report.all_pass = report.cond_I.pass && report.cond_II.pass && report.cond_III.pass && report.cond_IV.pass;
    return report;
}

std::string to_json(const AssumptionReport& r) {
    using nlohmann::json;
    json j;
    j["all_pass"] = r.all_pass;
    j["model"] = r.model;
    j["seed"] = r.seed;
    j["manifest_hash"] = r.manifest_hash;
    j["conditions"]["I"] = {{"pass", r.cond_I.pass},
                            {"hermitian_defect", r.cond_I.hermitian_defect},
                            {"min_eigenvalue", r.cond_I.min_eigenvalue}};
    j["conditions"]["II"] = {{"pass", r.cond_II.pass},
                             {"commutator_max", r.cond_II.commutator},
                             {"projection_commutator_max", r.cond_II.projection_commutator},
                             {"levels", r.cond_II.levels}};
    j["conditions"]["III"] = {{"pass", r.cond_III.pass},
                              {"rel_bound_a", r.cond_III.rel_bound_a},
                              {"rel_bound_b", r.cond_III.rel_bound_b},
                              {"analytic_a", r.cond_III.analytic_a},
                              {"analytic_b", r.cond_III.analytic_b},
                              {"analytic_source", r.cond_III.analytic_source},
                              {"analytic_min_slack", r.cond_III.analytic_min_slack},
                              {"random_samples", r.cond_III.random_samples},
                              {"basis_samples", r.cond_III.basis_samples},
                              {"blocks", r.cond_III.blocks}};
    j["conditions"]["IV"] = {{"pass", r.cond_IV.pass},
                             {"band_width_b", r.cond_IV.band_width_b},
                             {"residual", r.cond_IV.residual},
                             {"note", r.cond_IV.note}};
    j["notes"] = r.notes;
    return j.dump(2);
}

}  // namespace fockdyson::assumptions
