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

#include "pmldpe/config.hpp"
#include "pmldpe/harness.hpp"
#include "pmldpe/spectral.hpp"
#include "pmldpe/validation.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pmldpe;

namespace
{
    std::vector<std::string> with_flags(std::vector<std::string> overrides, std::optional<int> trials,
                                        std::optional<std::uint64_t> seed)
    {
        if (trials)
            overrides.push_back("scenario.trials=" + std::to_string(*trials));
        if (seed)
            overrides.push_back("scenario.master_seed=" + std::to_string(*seed));
        return overrides;
    }
}

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Bindings for the pmldpe C++ core";
    py::register_exception<Error>(m, "PmldpeError", PyExc_ValueError);

    m.def(
        "steering",
        [](double theta, int length, int elements, int subarray_length, double carrier)
        { return steering(LocalAoa(theta), length, ArrayConfig(elements, subarray_length, carrier)); },
        py::arg("theta"), py::arg("length"), py::arg("elements"), py::arg("subarray_length"),
        py::arg("carrier_frequency") = 5.9e9, "ULA response at angle theta (rad) over `length` elements");

    m.def(
        "los_bearing", [](std::pair<double, double> bs, std::pair<double, double> ms)
        { return los_bearing({bs.first, bs.second}, {ms.first, ms.second}).radians(); },
        py::arg("bs"), py::arg("ms"), "Global bearing of the BS seen from the MS, rad in [0, 2 pi)");

    m.def(
        "global_to_local", [](double bearing, double heading)
        { return global_to_local(GlobalBearing(bearing), GlobalBearing(heading)).radians(); },
        py::arg("bearing"), py::arg("heading"));

    m.def(
        "forward_covariance", [](const ComplexMatrix &samples, int subarray_length)
        { return forward_covariance(samples, subarray_length).matrix; },
        py::arg("samples"), py::arg("subarray_length"));

    m.def(
        "fb_covariance", [](const ComplexMatrix &fo)
        { return fb_covariance({fo, SmoothingKind::forward_only}).matrix; },
        py::arg("forward_covariance"));

    m.def(
        "smooth_music",
        [](const ComplexMatrix &r, int signal_dim, int elements, double carrier, int points)
        {
            const ArrayConfig cfg(elements, static_cast<int>(r.rows()), carrier);
            const AngularGrid grid(points);
            const MusicResult res = smooth_music({r, SmoothingKind::forward_backward}, signal_dim, grid, cfg);
            std::vector<double> angles;
            for (const auto &a : res.angles)
                angles.push_back(a.radians());
            py::dict out;
            out["angles"] = angles;
            out["pseudospectrum"] = RealVector(res.pseudospectrum);
            out["degenerate"] = res.degenerate;
            out["padded"] = res.padded;
            return out;
        },
        py::arg("covariance"), py::arg("signal_dim"), py::arg("elements"), py::arg("carrier_frequency") = 5.9e9,
        py::arg("points") = 2048);

    m.def(
        "capon_weights",
        [](const ComplexMatrix &r, double theta, int elements, double carrier)
        {
            const ArrayConfig cfg(elements, static_cast<int>(r.rows()), carrier);
            return capon_weights({r, SmoothingKind::forward_backward}, LocalAoa(theta), cfg);
        },
        py::arg("covariance"), py::arg("theta"), py::arg("elements"), py::arg("carrier_frequency") = 5.9e9);

    m.def(
        "feasibility",
        [](double bd, double bc, double alpha, double tobs, std::optional<double> tc)
        {
            ChannelParams ch;
            ch.doppler_spread = bd;
            ch.coherence_bandwidth = bc;
            if (tc)
                ch.coherence_time = *tc;
            const FeasibilityReport r = feasibility(ch, alpha, tobs);
            py::dict out;
            out["coherence_time"] = r.coherence_time;
            out["observation_time"] = r.observation_time;
            out["bandwidth_min"] = r.bandwidth_min;
            out["bandwidth_max"] = r.bandwidth_max;
            out["bandwidth"] = r.bandwidth;
            out["sampling_interval"] = r.sampling_interval;
            out["snapshots"] = r.snapshots;
            return out;
        },
        py::arg("bd"), py::arg("bc"), py::arg("alpha"), py::arg("tobs"), py::arg("tc") = py::none());

    m.def(
        "stationarity_time",
        [](double distance, double speed, double kappa, double miss_distance, int elements, double carrier)
        { return stationarity_time(distance, speed, kappa, {miss_distance, elements, carrier}); },
        py::arg("distance"), py::arg("speed"), py::arg("kappa") = 0.01, py::arg("miss_distance") = 0.06,
        py::arg("elements") = 64, py::arg("carrier_frequency") = 5.9e9);

    m.def(
        "scenario_ini", [](const std::string &path, const std::vector<std::string> &overrides)
        { return to_ini(load_scenario(path, overrides)); },
        py::arg("path"), py::arg("overrides") = std::vector<std::string>{},
        "Canonical text of a scenario file after overrides");

    m.def(
        "config_hash", [](const std::string &path, const std::vector<std::string> &overrides)
        { return hex64(config_hash(load_scenario(path, overrides))); },
        py::arg("path"), py::arg("overrides") = std::vector<std::string>{});

    m.def(
        "run_monte_carlo",
        [](const std::string &path, const std::vector<std::string> &overrides, std::optional<int> trials,
           std::optional<std::uint64_t> seed, unsigned threads)
        {
            const ScenarioConfig scenario = load_scenario(path, with_flags(overrides, trials, seed));
            MonteCarloOptions opts;
            opts.threads = threads;
            RmseSeries series;
            {
                py::gil_scoped_release release;
                series = run_monte_carlo(scenario, opts);
            }
            py::dict rmse;
            for (std::size_t e = 0; e < series.estimators.size(); ++e)
                rmse[py::str(to_string(series.estimators[e]))] = series.rmse[e];
            py::dict out;
            out["times"] = series.times;
            out["rmse"] = rmse;
            out["trials"] = series.trials;
            out["config_hash"] = hex64(config_hash(scenario));
            return out;
        },
        py::arg("path"), py::arg("overrides") = std::vector<std::string>{}, py::arg("trials") = py::none(),
        py::arg("seed") = py::none(), py::arg("threads") = 0u,
        "RMSE of every enabled estimator versus time for a scenario file");

    m.def(
        "core_checks", [](std::uint64_t seed)
        {
            std::vector<std::tuple<std::string, bool, std::string>> out;
            for (const auto &r : run_core_checks(seed))
                out.emplace_back(r.name, r.passed, r.detail);
            return out;
        },
        py::arg("seed") = 1);
}
