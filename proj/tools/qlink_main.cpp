// Copyright 2026 The qlink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qlink: run a remote-entanglement scenario and write the result table.
//
//   qlink <fringe|correlation|chsh|oracle> [--config PATH] [--seed U64]
//         [--trials N] [--out PATH] [--workers N]
//
// Exit codes: 0 success, 2 configuration or usage error, 3 runtime error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qlink/config.hpp"
#include "qlink/scenario.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

struct Overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::optional<unsigned> workers;
    std::string out;
};

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Remote atomic-qubit entanglement simulator"};
    app.require_subcommand(1, 1);

    Overrides opts;
    for (auto scenario : {qlink::Scenario::kFringe, qlink::Scenario::kCorrelation, qlink::Scenario::kChsh,
                          qlink::Scenario::kOracle}) {
        std::string name(qlink::scenario_name(scenario));
        CLI::App *sub = app.add_subcommand(name, "Run the " + name + " scenario");
        sub->add_option("--config", opts.config_path, "Configuration file (key = value)");
        sub->add_option("--seed", opts.seed, "Master RNG seed");
        sub->add_option("--trials", opts.trials, "Trials per point (overrides duration_s)")->check(CLI::PositiveNumber);
        sub->add_option("--out", opts.out, "Output CSV path (default: stdout)");
        sub->add_option("--workers", opts.workers, "Concurrent sampling workers")->check(CLI::Range(1u, 1024u));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitConfigError;
    }

    qlink::ExperimentConfig config;
    try {
        if (!opts.config_path.empty()) {
            config = qlink::load_config(opts.config_path);
        }
        config.scenario = *qlink::parse_scenario(app.get_subcommands().front()->get_name());
        if (opts.seed) config.seed = *opts.seed;
        if (opts.trials) config.trials = *opts.trials;
        if (opts.workers) config.workers = *opts.workers;
        if (!opts.out.empty()) config.output_path = opts.out;
        config.validate();
    } catch (const qlink::ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    }

    try {
        qlink::ResultTable table = qlink::run_scenario(config);
        if (config.output_path.empty()) {
            qlink::write_table(table, std::cout);
        } else {
            qlink::write_table(table, std::filesystem::path(config.output_path));
        }
    } catch (const qlink::ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntimeError;
    }
    return 0;
}
