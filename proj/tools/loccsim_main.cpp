#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "loccsim/experiments.hpp"
#include "loccsim/version.hpp"

namespace {

// Exit codes: 0 success, 2 config error, 3 numerical-invariant failure.
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int run(const std::string& experiment, const std::string& config_path,
        const std::vector<std::string>& overrides, const std::string& out_path) {
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "config error: cannot read '" << config_path << "'\n";
        return kExitConfig;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();

    try {
        nlohmann::json doc;
        {
            // Reuse the line-numbered parse diagnostics.
            loccsim::ExperimentConfig probe = loccsim::parse_config(buffer.str());
            doc = probe.resolved();
        }
        if (!experiment.empty()) doc["experiment"] = experiment;
        for (const auto& assignment : overrides)
            loccsim::apply_override(doc, assignment);
        if (!out_path.empty()) doc["output"]["path"] = out_path;

        loccsim::ExperimentConfig config = loccsim::config_from_json(doc);
        if (!experiment.empty() && config.experiment != experiment) {
            std::cerr << "config error: experiment '" << config.experiment
                      << "' in config does not match subcommand '" << experiment
                      << "'\n";
            return kExitConfig;
        }
        loccsim::run_experiment(config, std::cout);
        std::cout << "wrote " << config.output_path << "\n";
        return 0;
    } catch (const loccsim::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"loccsim: coherent vs measurement-feedback models of the "
                 "oscillator-qubit gravitational coupling"};
    app.set_version_flag("--version", std::string(loccsim::kVersion));
    app.require_subcommand(0, 1);

    std::string config_path, out_path;
    std::vector<std::string> overrides;

    const std::vector<std::string> experiments = {
        "revival", "trajectories", "kraus-audit", "rates", "blackhole"};
    std::vector<CLI::App*> subs;
    for (const auto& name : experiments) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON experiment config")
            ->required();
        sub->add_option("--set", overrides,
                        "override a config entry, e.g. parameters.dim=32");
        sub->add_option("--out", out_path, "override the output path");
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);

    for (std::size_t i = 0; i < subs.size(); ++i)
        if (subs[i]->parsed())
            return run(experiments[i], config_path, overrides, out_path);

    std::cerr << app.help() << "\n";
    return kExitConfig;
}
