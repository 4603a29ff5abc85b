// SPDX-License-Identifier: Apache-2.0
//
// pmldpe: pseudo maximum likelihood direct position estimation for mobile arrays
// Copyright (C) 2026 The pmldpe authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef PMLDPE_CLI_HPP
#define PMLDPE_CLI_HPP

#include "pmldpe/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pmldpe
{
    enum class Command
    {
        simulate,
        feasibility,
        spectrum,
        validate,
    };

    struct CliOptions
    {
        Command command = Command::simulate;

        // simulate / spectrum
        std::string scenario;
        std::string out_dir;
        std::vector<std::string> overrides;
        std::optional<std::uint64_t> seed;
        std::optional<int> trials;
        int traces = 1;
        unsigned threads = 0;
        bool quiet = false;
        int step = 1;

        // feasibility
        double doppler_spread = 512.0;
        double coherence_bandwidth = 250e3;
        double rolloff = 0.5;
        double observation_time = 325e-6;
        std::optional<double> coherence_time;
        std::vector<double> distances{100.0, 20.0};
        double speed_kmh = 50.0;
        double kappa = 0.01;
        int elements = 64;
        double carrier_frequency = 5.9e9;
        int curve_points = 101;

        // validate
        std::string preset_dir;
    };

    // Thrown by parse_args. exit_code is 0 for help output, 2 for usage errors.
    class UsageError : public Error
    {
    public:
        UsageError(const std::string &message, int exit_code) : Error(message), exit_code_(exit_code) {}
        int exit_code() const { return exit_code_; }

    private:
        int exit_code_;
    };

    CliOptions parse_args(int argc, const char *const *argv);

    // Returns the process exit code: 0 success, 1 failure reported by the library
    int execute(const CliOptions &options, std::ostream &out, std::ostream &err);

    // parse_args + execute with usage errors mapped to exit code 2
    int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

    // Output directory used when --out is absent: $PMLDPE_OUT_DIR, else "results"
    std::string default_out_dir();
}

#endif
