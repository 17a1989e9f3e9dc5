// Copyright 2026 The synswap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line runner.
//
//   synswap <sync|hom-overlap|swap|chsh|full> [--scenario FILE] [--seed N]
//           [--out DIR] [--events-per-setting N] [--jitter-fs X] [--overlap I]
//
// Exit codes: 0 success, 2 validation error, 3 runtime error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "synswap/synswap.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct Options {
    std::string scenario_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> events_per_setting;
    std::optional<double> jitter_fs;
    std::optional<double> overlap;
    bool quiet = false;
};

int run(synswap::experiment::Stage stage, const Options &opt) {
    using namespace synswap::experiment;
    Scenario s = opt.scenario_path.empty() ? Scenario{} : load_scenario(opt.scenario_path);
    if (opt.seed) {
        s.seed = opt.seed;
    }
    if (opt.out_dir) {
        s.output_dir = *opt.out_dir;
    }
    if (opt.events_per_setting) {
        s.events_per_setting = *opt.events_per_setting;
    }
    if (opt.jitter_fs) {
        s.jitter_override_fs = opt.jitter_fs;
    }
    if (opt.overlap) {
        s.overlap_override = opt.overlap;
    }
    const RunRecord record = run_pipeline(s, stage);
    const auto files = emit_outputs(record, s.output_dir);
    if (!opt.quiet) {
        std::cout << format_summary(record);
        for (const auto &f : files) {
            std::cout << "wrote " << f.string() << "\n";
        }
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Entanglement swapping with synchronized independent pair sources"};
    app.set_version_flag("--version", synswap::kVersion);
    app.require_subcommand(1);

    Options opt;
    std::optional<synswap::experiment::Stage> chosen;

    const std::pair<const char *, const char *> commands[] = {
        {"sync", "simulate laser synchronization and the cross-correlator"},
        {"hom-overlap", "coherence time and two-photon mode overlap"},
        {"swap", "heralded state of photons 1 and 4 and its coincidence curves"},
        {"chsh", "Monte-Carlo CHSH test on the swapped state"},
        {"full", "all of the above"},
    };
    for (const auto &[name, help] : commands) {
        CLI::App *sub = app.add_subcommand(name, help);
        sub->add_option("--scenario", opt.scenario_path, "scenario file (key = value)")
            ->check(CLI::ExistingFile);
        sub->add_option("--seed", opt.seed, "root seed for every random draw");
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--events-per-setting", opt.events_per_setting,
                        "fourfold events per CHSH setting");
        sub->add_option("--jitter-fs", opt.jitter_fs, "override the timing jitter (fs rms)");
        sub->add_option("--overlap", opt.overlap, "override the mode overlap I in [0, 1]");
        sub->add_flag("-q,--quiet", opt.quiet, "no summary on stdout");
        const std::string stage_name = name;
        sub->callback([&chosen, stage_name] { chosen = synswap::experiment::parse_stage(stage_name); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        return run(*chosen, opt);
    } catch (const synswap::ValidationError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const synswap::RuntimeError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
