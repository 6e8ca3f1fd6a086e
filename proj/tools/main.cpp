// Copyright 2026 The qtangle Authors
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

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "commands.hpp"

using qtangle::cli::RunConfig;

namespace {

void add_common(CLI::App *sub, RunConfig &cfg) {
    sub->add_option("--in", cfg.in, "input state file (JSON)");
    sub->add_option("--out", cfg.out, "write the report here instead of stdout");
    sub->add_option("--method", cfg.method, "method name");
    sub->add_option("--shots", cfg.shots, "shots per phase point; 0 means exact");
    sub->add_option("--seed", cfg.seed, "RNG seed (required when --shots > 0)");
    sub->add_option("--chi-points", cfg.chi_points, "number of phase points")->check(CLI::Range(3, 1 << 20));
    sub->add_flag("--override-purity", cfg.override_purity, "accept mixed input where purity is required");
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"qtangle: concurrence and 3-tangle from interferometric moment circuits"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto *conc = app.add_subcommand("concurrence", "two-qubit concurrence");
    add_common(conc, cfg);
    auto *tangle = app.add_subcommand("tangle3", "residual 3-tangle of a pure three-qubit state");
    add_common(tangle, cfg);
    auto *fringe = app.add_subcommand("fringe", "interference fringe as CSV");
    add_common(fringe, cfg);
    fringe->add_option("--unitary", cfg.unitary, "'identity' or a JSON unitary/channel file");
    fringe->add_option("--moment", cfg.moment, "use the m-th moment circuit instead")->check(CLI::Range(1, 4));
    auto *moments = app.add_subcommand("moments", "moments of rho rho~ from the term expansion");
    add_common(moments, cfg);
    moments->add_option("--format", cfg.format, "json or csv (term table)");
    moments->add_option("--moment", cfg.moment, "restrict to one moment")->check(CLI::Range(1, 4));
    auto *circuits = app.add_subcommand("circuits", "circuit counts");
    add_common(circuits, cfg);
    circuits->add_option("--format", cfg.format, "json or csv (class table, needs --in)");
    auto *random = app.add_subcommand("random", "random state file");
    add_common(random, cfg);
    random->add_option("--qubits", cfg.qubits, "number of qubits")->check(CLI::Range(1, 4));
    random->add_flag("--pure", cfg.pure, "Haar-random pure state");
    random->add_option("--rank", cfg.rank, "rank of the mixed state (default full)");
    auto *validate = app.add_subcommand("validate", "check a state file");
    add_common(validate, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        auto result = qtangle::cli::run(cfg);
        if (cfg.out.empty()) {
            std::cout << result.text;
        } else {
            std::ofstream f(cfg.out, std::ios::binary);
            f << result.text;
            if (!f) {
                throw qtangle::InvalidInput("cannot write '" + cfg.out + "'");
            }
        }
        std::cerr << result.summary << "\n";
    } catch (const qtangle::Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return qtangle::exit_code(e.kind());
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
