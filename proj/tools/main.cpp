// fockdyson: build bundles, certify them, and run Dyson experiments.
//
//   fockdyson certify     --config run.toml [--seed N] [--out DIR]
//   fockdyson propagate   --config run.toml [--require-certified]
//   fockdyson emit-bundle --config run.toml
//
// Exit codes: 0 success, 1 failed certification, 2 rejected configuration,
// 3 any other runtime error.

#include <iostream>

#include "CLI11.hpp"
#include "fockdyson/experiment.hpp"

namespace fx = fockdyson::experiment;

int main(int argc, char** argv) {
    CLI::App app{"Fock-space Dyson series experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    bool require_certified = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "TOML experiment configuration")->required();
        sub->add_option("--seed", seed, "sampling seed (overrides the config)");
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        sub->add_flag("--require-certified", require_certified, "exit 1 unless all assumptions certify");
    };
    auto* certify = app.add_subcommand("certify", "check the four structural conditions");
    auto* propagate = app.add_subcommand("propagate", "run the Dyson series and compare with the exact propagator");
    auto* emit = app.add_subcommand("emit-bundle", "write H0, H1, A and the manifest, no dynamics");
    for (auto* sub : {certify, propagate, emit}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        fx::ExperimentConfig config = fx::load_config(config_path);
        if (seed) config.seed = *seed;
        if (out_dir) config.output_dir = *out_dir;
        const fx::Command command = certify->parsed()     ? fx::Command::certify
                                    : propagate->parsed() ? fx::Command::propagate
                                                          : fx::Command::emit_bundle;
        return fx::run(command, config, fx::RunFlags{require_certified}, std::cout);
    } catch (const fx::ConfigError& e) {
        std::cerr << "configuration rejected: " << e.what() << '\n';
        return 2;
    } catch (const fockdyson::ThresholdError& e) {
        std::cerr << "configuration rejected: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
