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

#ifndef PMLDPE_VALIDATION_HPP
#define PMLDPE_VALIDATION_HPP

#include "pmldpe/harness.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pmldpe
{
    struct CheckResult
    {
        std::string name;
        bool passed = false;
        std::string detail;
    };

    // Randomised algebraic invariants and closed-form oracles, independent of any scenario
    std::vector<CheckResult> run_core_checks(std::uint64_t seed = 1);

    // Recursive/batch agreement, determinism and pooling on a shortened copy of the scenario
    std::vector<CheckResult> run_scenario_checks(const ScenarioConfig &scenario);

    // Copy of `scenario` cut down to a few seconds, a few trials and a coarse grid
    ScenarioConfig reduced_scenario(const ScenarioConfig &scenario, double duration = 1.0, double spacing = 4.0);

    // One "PASS name: detail" / "FAIL name: detail" line each; returns true when all passed
    bool report(std::ostream &os, const std::vector<CheckResult> &results);
}

#endif
