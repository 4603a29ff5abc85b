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

#ifndef PMLDPE_CONFIG_HPP
#define PMLDPE_CONFIG_HPP

#include "pmldpe/harness.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pmldpe
{
    // Scenario files are INI text: [section] headers and `key = value` lines. Overrides use
    // "section.key=value". Unknown sections or keys are errors.
    ScenarioConfig parse_scenario(std::istream &is, const std::vector<std::string> &overrides = {});
    ScenarioConfig parse_scenario_string(const std::string &text, const std::vector<std::string> &overrides = {});
    ScenarioConfig load_scenario(const std::string &path, const std::vector<std::string> &overrides = {});

    // Canonical INI rendering; parse_scenario(to_ini(c)) reproduces c
    std::string to_ini(const ScenarioConfig &config);

    // FNV-1a 64 of the canonical rendering
    std::uint64_t config_hash(const ScenarioConfig &config);

    std::string hex64(std::uint64_t value);
}

#endif
