#include "fockdyson/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "fockdyson/assumptions.hpp"
#include "fockdyson/dyson.hpp"
#include "toml.hpp"

namespace fockdyson::experiment {

namespace fs = std::filesystem;

namespace {

// Typed access to one TOML table that remembers which keys were consumed, so
// leftovers can be reported as unknown.
class TableReader {
public:
    TableReader(const toml::table& table, std::string path) : table_(table), path_(std::move(path)) {}

    std::optional<double> number(const std::string& key) {
        const toml::node* n = take(key);
        if (!n) return std::nullopt;
        if (n->is_integer()) return static_cast<double>(n->as_integer()->get());
        if (n->is_floating_point()) {
            const double v = n->as_floating_point()->get();
            if (!std::isfinite(v)) fail(key, "must be finite");
            return v;
        }
        fail(key, "must be a number");
    }

    std::optional<std::int64_t> integer(const std::string& key) {
        const toml::node* n = take(key);
        if (!n) return std::nullopt;
        if (!n->is_integer()) fail(key, "must be an integer");
        return n->as_integer()->get();
    }

    std::optional<std::string> string(const std::string& key) {
        const toml::node* n = take(key);
        if (!n) return std::nullopt;
        if (!n->is_string()) fail(key, "must be a string");
        return n->as_string()->get();
    }

    std::optional<TableReader> table(const std::string& key) {
        const toml::node* n = take(key);
        if (!n) return std::nullopt;
        if (!n->is_table()) fail(key, "must be a table");
        return TableReader(*n->as_table(), qualified(key));
    }

    void finish() const {
        for (const auto& [key, node] : table_) {
            const std::string k(key.str());
            if (!seen_.count(k)) throw ConfigError("unknown configuration key '" + qualified(k) + "'");
        }
    }

    [[noreturn]] void fail(const std::string& key, const std::string& why) const {
        throw ConfigError("configuration key '" + qualified(key) + "' " + why);
    }

private:
    const toml::node* take(const std::string& key) {
        seen_.insert(key);
        return table_.get(key);
    }
    std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const toml::table& table_;
    std::string path_;
    std::set<std::string> seen_;
};

ModelKind parse_model(const std::string& name) {
    if (name == "dirac_maxwell") return ModelKind::dirac_maxwell;
    if (name == "dirac_klein_gordon") return ModelKind::dirac_klein_gordon;
    if (name == "toy_single_mode") return ModelKind::toy_single_mode;
    if (name == "external_bundle") return ModelKind::external_bundle;
    throw ConfigError("unknown model '" + name +
                      "' (expected dirac_maxwell, dirac_klein_gordon, toy_single_mode or external_bundle)");
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << text << '\n';
}

}  // namespace

double ExperimentConfig::charge_value() const { return charge.value_or(std::sqrt(fine_structure)); }

std::string model_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::dirac_maxwell: return "dirac_maxwell";
        case ModelKind::dirac_klein_gordon: return "dirac_klein_gordon";
        case ModelKind::toy_single_mode: return "toy_single_mode";
        case ModelKind::external_bundle: return "external_bundle";
    }
    return "unknown";
}

ExperimentConfig parse_config(const std::string& toml_text, const std::string& origin) {
    toml::table root;
    try {
        root = toml::parse(toml_text, origin);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << origin << ": " << e.description() << " (line " << e.source().begin.line << ")";
        throw ConfigError(msg.str());
    }

    ExperimentConfig c;
    TableReader top(root, "");
    const auto model = top.string("model");
    require(model.has_value(), "configuration needs a 'model' key");
    c.model = parse_model(*model);
    // The single-mode model has no lattice, so it gets a deeper default truncation.
    if (c.model == ModelKind::toy_single_mode) c.n_max = 14;

    if (auto v = top.integer("seed")) {
        require(*v >= 0, "seed must be non-negative");
        c.seed = static_cast<std::uint64_t>(*v);
    }
    if (auto v = top.string("output")) c.output_dir = *v;

    if (auto t = top.table("constants")) {
        if (auto v = t->number("fine_structure")) c.fine_structure = *v;
        t->finish();
    }
    require(c.fine_structure > 0.0, "constants.fine_structure must be positive");

    if (auto t = top.table("lattice")) {
        if (auto v = t->integer("points_per_axis")) c.points_per_axis = static_cast<int>(*v);
        if (auto v = t->number("spacing")) c.spacing = *v;
        t->finish();
    }
    require(c.points_per_axis >= 1 && c.points_per_axis % 2 == 1, "lattice.points_per_axis must be odd and >= 1");
    require(c.spacing > 0.0, "lattice.spacing must be positive");

    if (auto t = top.table("particle")) {
        if (auto v = t->number("mass")) c.mass = *v;
        if (auto v = t->number("charge")) c.charge = *v;
        t->finish();
    }
    require(c.mass > 0.0, "particle.mass must be positive");

    if (auto t = top.table("coupling")) {
        if (auto v = t->number("lambda")) c.coupling = *v;
        if (auto v = t->number("omega")) c.omega = *v;
        t->finish();
    }
    require(c.omega > 0.0, "coupling.omega must be positive");

    if (auto t = top.table("potential")) {
        const auto kind = t->string("kind").value_or("zero");
        if (kind == "zero") {
            c.potential = dirac::PotentialKind::zero;
        } else if (kind == "coulomb") {
            c.potential = dirac::PotentialKind::coulomb;
            const auto z = t->number("z");
            require(z.has_value(), "potential.z is required for a coulomb potential");
            c.z = *z;
        } else {
            t->fail("kind", "must be 'zero' or 'coulomb'");
        }
        t->finish();
    }

    if (auto t = top.table("cutoff")) {
        const auto profile = t->string("profile").value_or("gaussian");
        if (profile == "gaussian")
            c.cutoff.profile = field::CutoffProfile::gaussian;
        else if (profile == "sharp")
            c.cutoff.profile = field::CutoffProfile::sharp;
        else
            t->fail("profile", "must be 'gaussian' or 'sharp'");
        if (auto v = t->number("width")) {
            require(*v > 0.0, "cutoff.width must be positive");
            c.cutoff.width = *v;
        }
        t->finish();
    }
    require(c.cutoff.profile != field::CutoffProfile::sharp || c.cutoff.width.has_value(),
            "a sharp cutoff needs cutoff.width (k_max)");

    if (auto t = top.table("fock")) {
        if (auto v = t->integer("n_max")) c.n_max = static_cast<int>(*v);
        t->finish();
    }
    require(c.n_max >= 0, "fock.n_max must be non-negative");

    if (auto t = top.table("dyson")) {
        if (auto v = t->number("t")) c.dyson.t = *v;
        if (auto v = t->number("t_prime")) c.dyson.t_prime = *v;
        if (auto v = t->integer("order")) c.dyson.order = static_cast<int>(*v);
        if (auto v = t->integer("nodes")) c.dyson.nodes = static_cast<int>(*v);
        if (auto v = t->integer("initial")) c.dyson.initial = *v;
        t->finish();
    }
    require(c.dyson.order >= 0, "dyson.order must be non-negative");
    require(c.dyson.nodes >= 2, "dyson.nodes must be at least 2");
    require(c.dyson.initial >= 0, "dyson.initial must be a non-negative basis index");

    if (auto t = top.table("certify")) {
        if (auto v = t->integer("samples")) c.samples = *v;
        t->finish();
    }
    require(c.samples >= 0, "certify.samples must be non-negative");

    if (auto t = top.table("bundle")) {
        if (auto v = t->string("path")) c.bundle_path = *v;
        t->finish();
    }
    require(c.model != ModelKind::external_bundle || !c.bundle_path.empty(),
            "external_bundle needs bundle.path");
    top.finish();

    if (c.potential == dirac::PotentialKind::coulomb) {
        try {
            dirac::check_coulomb_gate(c.z, c.charge_value());
        } catch (const ThresholdError& e) {
            throw ConfigError(e.what());
        }
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file " + path);
    std::stringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path);
}

ModelBundle build_bundle(const ExperimentConfig& c) {
    const auto potential = [&](const dirac::PositionLattice& lattice) {
        if (c.potential == dirac::PotentialKind::coulomb) return dirac::coulomb_values(lattice, c.z, c.charge_value());
        return dirac::zero_potential(lattice);
    };
    switch (c.model) {
        case ModelKind::dirac_maxwell: {
            field::DiracMaxwellParams p;
            p.points_per_axis = c.points_per_axis;
            p.spacing = c.spacing;
            p.mass = c.mass;
            p.charge = c.charge_value();
            p.potential = potential(dirac::PositionLattice(c.points_per_axis, c.spacing));
            p.cutoff = c.cutoff;
            p.n_max = c.n_max;
            return field::total_hamiltonian(p).bundle;
        }
        case ModelKind::dirac_klein_gordon: {
            field::DiracKleinGordonParams p;
            p.points_per_axis = c.points_per_axis;
            p.spacing = c.spacing;
            p.mass = c.mass;
            p.coupling = c.coupling;
            p.potential = potential(dirac::PositionLattice(c.points_per_axis, c.spacing));
            p.cutoff = c.cutoff;
            p.n_max = c.n_max;
            return field::dkg_hamiltonian(p).bundle;
        }
        case ModelKind::toy_single_mode:
            return field::single_mode_toy(c.omega, c.coupling, c.n_max);
        case ModelKind::external_bundle:
            return read_bundle(c.bundle_path);
    }
    throw ConfigError("unhandled model");
}

int run(Command command, const ExperimentConfig& config, const RunFlags& flags, std::ostream& log) {
    const fs::path out(config.output_dir);
    fs::create_directories(out);
    const ModelBundle bundle = build_bundle(config);
    log << "model " << bundle.manifest().model << ", dimension " << bundle.dim() << '\n';

    if (command == Command::emit_bundle) {
        write_bundle((out / "bundle").string(), bundle);
        log << "bundle written to " << (out / "bundle").string() << '\n';
        return 0;
    }

    write_text(out / "manifest.json", bundle.manifest().to_json());

    const auto certify = [&] {
        assumptions::SamplingOptions opts;
        opts.seed = config.seed;
        opts.samples = config.samples;
        const auto report = assumptions::certify(bundle, opts);
        write_text(out / "assumption_report.json", assumptions::to_json(report));
        log << "certification " << (report.all_pass ? "passed" : "FAILED") << " (I "
            << report.cond_I.pass << ", II " << report.cond_II.pass << ", III " << report.cond_III.pass
            << ", IV " << report.cond_IV.pass << "), b = " << report.cond_IV.band_width_b << '\n';
        return report.all_pass;
    };

    if (command == Command::certify) return certify() ? 0 : 1;

    if (flags.require_certified && !certify()) {
        log << "refusing to propagate: certification failed\n";
        return 1;
    }
    const dyson::DysonEngine engine(bundle);
    if (config.dyson.initial >= bundle.dim())
        throw ConfigError("dyson.initial exceeds the bundle dimension");
    dyson::RunOptions opts;
    opts.seed = config.seed;
    const auto xi = dyson::basis_vector(bundle.dim(), config.dyson.initial);
    const auto result =
        engine.propagate(xi, config.dyson.t, config.dyson.t_prime, config.dyson.order, config.dyson.nodes, opts);
    write_text(out / "dyson_run.json", dyson::to_json(result));
    std::ofstream csv(out / "dyson_run.csv");
    csv << dyson::to_csv(result);
    log << "propagated to t = " << result.t << " at order " << result.order << ", margin " << result.margin
        << (result.trusted ? " (trusted)" : " (UNTRUSTED)");
    if (result.oracle.available) log << ", oracle discrepancy " << result.oracle.discrepancy;
    log << '\n';
    return 0;
}

}  // namespace fockdyson::experiment
