// experiment.hpp: config-driven runner behind the `fockdyson` command line.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "fockdyson/bundle.hpp"
#include "fockdyson/field.hpp"

namespace fockdyson::experiment {

// The configuration was rejected (schema violation or a physical gate).
class ConfigError : public Error {
public:
    using Error::Error;
};

enum class ModelKind { dirac_maxwell, dirac_klein_gordon, toy_single_mode, external_bundle };

struct DysonSettings {
    double t = 1.0;
    double t_prime = 0.0;
    int order = 12;
    int nodes = 16;
    Index initial = 0;  // basis index of the initial vector
};

struct ExperimentConfig {
    ModelKind model = ModelKind::toy_single_mode;
    std::string bundle_path;  // external_bundle only

    int points_per_axis = 1;
    double spacing = 1.0;
    double mass = 1.0;
    double fine_structure = 1.0 / 137.035999;
    std::optional<double> charge;  // defaults to sqrt(fine_structure)
    double coupling = 0.1;         // lambda for the scalar and single-mode models
    double omega = 1.0;            // single-mode frequency

    dirac::PotentialKind potential = dirac::PotentialKind::zero;
    double z = 0.0;
    field::CutoffSpec cutoff;
    int n_max = 2;

    DysonSettings dyson;
    Index samples = 10'000;
    std::uint64_t seed = 1;
    std::string output_dir = "out";

    double charge_value() const;
};

std::string model_name(ModelKind kind);

// Parses and validates TOML text; unknown keys are errors. The Coulomb gate
// Z q^2 < 1/2 is enforced here. Throws ConfigError.
ExperimentConfig parse_config(const std::string& toml_text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::string& path);

ModelBundle build_bundle(const ExperimentConfig& config);

enum class Command { certify, propagate, emit_bundle };

struct RunFlags {
    bool require_certified = false;
};

// Executes one command and writes its artifacts below config.output_dir:
//   emit-bundle  bundle/{H0,H1,A}.mtx, bundle/manifest.json
//   certify      manifest.json, assumption_report.json
//   propagate    manifest.json, dyson_run.json, dyson_run.csv
//                (+ assumption_report.json with --require-certified)
// Returns the process exit code: 0 success, 1 failed certification (always for
// `certify`, only with require_certified for `propagate`). Configuration errors
// propagate as ConfigError.
int run(Command command, const ExperimentConfig& config, const RunFlags& flags, std::ostream& log);

}  // namespace fockdyson::experiment
