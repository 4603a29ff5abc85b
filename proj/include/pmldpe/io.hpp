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

#ifndef PMLDPE_IO_HPP
#define PMLDPE_IO_HPP

#include "pmldpe/harness.hpp"
#include "pmldpe/spectral.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace pmldpe
{
    // Comment lines written at the top of every CSV so a file identifies its run
    struct RunStamp
    {
        std::string scenario;
        std::uint64_t config_hash = 0;
        std::uint64_t master_seed = 0;
    };

    void write_stamp(std::ostream &os, const RunStamp &stamp);

    // t_s,estimator,rmse_m,trials
    void write_rmse_csv(std::ostream &os, const RmseSeries &series, const RunStamp &stamp);

    // k,t_s,bs,estimator,p0_x,p0_y,p_x,p_y,candidates,true_x,true_y,error_m
    void write_trace_csv(std::ostream &os, const TrialResult &trial, int trial_index, const RunStamp &stamp);

    // Fixed-format number used by every writer
    std::string csv_number(double value);

    // Creates parent directories and opens for writing; throws Error on failure
    void write_file(const std::string &path, const std::string &contents);
}

#endif
