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

#include "pmldpe/io.hpp"

#include "pmldpe/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace pmldpe
{
    std::string csv_number(double value)
    {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.10g", value);
        return buf;
    }

    void write_stamp(std::ostream &os, const RunStamp &stamp)
    {
        os << "# pmldpe scenario=" << stamp.scenario << " config_hash=" << hex64(stamp.config_hash)
           << " master_seed=" << stamp.master_seed << '\n';
    }

    void write_rmse_csv(std::ostream &os, const RmseSeries &series, const RunStamp &stamp)
    {
        write_stamp(os, stamp);
        os << "t_s,estimator,rmse_m,trials\n";
        for (std::size_t k = 0; k < series.times.size(); ++k)
            for (std::size_t e = 0; e < series.estimators.size(); ++e)
                os << csv_number(series.times[k]) << ',' << to_string(series.estimators[e]) << ','
                   << csv_number(series.rmse[e][k]) << ',' << series.trials << '\n';
    }

    void write_trace_csv(std::ostream &os, const TrialResult &trial, int trial_index, const RunStamp &stamp)
    {
        write_stamp(os, stamp);
        os << "# trial=" << trial_index << " trial_seed=" << trial.seed << '\n';
        os << "k,t_s,bs,estimator,p0_x,p0_y,p_x,p_y,candidates,true_x,true_y,error_m\n";
        for (const auto &step : trial.steps)
            for (std::size_t e = 0; e < step.estimates.size(); ++e)
            {
                const auto &rec = step.estimates[e];
                os << step.step << ',' << csv_number(step.time) << ',' << step.bs_id << ','
                   << to_string(trial.estimators[e]) << ',' << csv_number(rec.estimate.initial.x) << ','
                   << csv_number(rec.estimate.initial.y) << ',' << csv_number(rec.estimate.current.x) << ','
                   << csv_number(rec.estimate.current.y) << ',' << rec.estimate.candidate_count << ','
                   << csv_number(step.truth.x) << ',' << csv_number(step.truth.y) << ',' << csv_number(rec.error)
                   << '\n';
            }
    }

    void write_file(const std::string &path, const std::string &contents)
    {
        const std::filesystem::path p(path);
        std::error_code ec;
        if (p.has_parent_path())
            std::filesystem::create_directories(p.parent_path(), ec);
        if (ec)
            throw Error("cannot create directory '" + p.parent_path().string() + "': " + ec.message());
        std::ofstream os(p, std::ios::binary);
        if (!os)
            throw Error("cannot write '" + path + "'");
        os << contents;
        if (!os)
            throw Error("write failed for '" + path + "'");
    }
}
