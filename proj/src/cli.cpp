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

#include "pmldpe/cli.hpp"

#include "pmldpe/config.hpp"
#include "pmldpe/harness.hpp"
#include "pmldpe/io.hpp"
#include "pmldpe/validation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <sstream>

#ifndef PMLDPE_PRESET_DIR
#define PMLDPE_PRESET_DIR "presets"
#endif

namespace pmldpe
{
    namespace
    {
        namespace fs = std::filesystem;

        std::string fixed(double v, int digits)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.*f", digits, v);
            return buf;
        }

        std::string join(const std::string &dir, const std::string &file)
        {
            return (fs::path(dir) / file).string();
        }

        ScenarioConfig load_with_flags(const CliOptions &o)
        {
            std::vector<std::string> overrides = o.overrides;
            if (o.seed)
                overrides.push_back("scenario.master_seed=" + std::to_string(*o.seed));
            if (o.trials)
                overrides.push_back("scenario.trials=" + std::to_string(*o.trials));
            return load_scenario(o.scenario, overrides);
        }

        int run_simulate(const CliOptions &o, std::ostream &out, std::ostream &err)
        {
            const ScenarioConfig scenario = load_with_flags(o);
            const RunStamp stamp{scenario.name, config_hash(scenario), scenario.master_seed};
            const std::string dir = o.out_dir.empty() ? default_out_dir() : o.out_dir;

            MonteCarloOptions mc;
            mc.threads = o.threads;
            if (!o.quiet)
            {
                const int every = std::max(1, scenario.trials / 10);
                mc.progress = [&err, every](int done, int total)
                {
                    if (done % every == 0 || done == total)
                        err << "trials " << done << "/" << total << '\n';
                };
            }
            std::vector<std::string> written;
            mc.on_trial = [&](int index, const TrialResult &trial)
            {
                if (index - scenario.first_trial >= o.traces)
                    return;
                std::ostringstream os;
                write_trace_csv(os, trial, index, stamp);
                const std::string path = join(dir, "trace_" + scenario.name + "_" + std::to_string(index) + ".csv");
                write_file(path, os.str());
                written.push_back(path);
            };

            const RmseSeries series = run_monte_carlo(scenario, mc);
            std::ostringstream os;
            write_rmse_csv(os, series, stamp);
            const std::string rmse_path = join(dir, "rmse_" + scenario.name + ".csv");
            write_file(rmse_path, os.str());
            write_file(join(dir, scenario.name + ".effective.ini"), to_ini(scenario));

            out << "scenario " << scenario.name << "  config_hash " << hex64(stamp.config_hash) << "  master_seed "
                << scenario.master_seed << "  trials " << series.trials << '\n';
            if (!series.times.empty())
            {
                const double last = series.times.back();
                out << "estimator      rmse@end_m  mean_rmse_last_2s_m  best_rmse_first_2s_m\n";
                for (std::size_t e = 0; e < series.estimators.size(); ++e)
                {
                    double best = INFINITY;
                    for (std::size_t k = 0; k < series.times.size() && series.times[k] <= 2.0; ++k)
                        best = std::min(best, series.rmse[e][k]);
                    char line[160];
                    std::snprintf(line, sizeof line, "%-13s  %10.3f  %19.3f  %20.3f\n",
                                  to_string(series.estimators[e]).c_str(), series.rmse[e].back(),
                                  series.mean_rmse_after(series.estimators[e], last - 2.0), best);
                    out << line;
                }
            }
            out << "wrote " << rmse_path << '\n';
            for (const auto &p : written)
                out << "wrote " << p << '\n';
            return 0;
        }

        int run_feasibility(const CliOptions &o, std::ostream &out)
        {
            ChannelParams channel;
            channel.doppler_spread = o.doppler_spread;
            channel.coherence_bandwidth = o.coherence_bandwidth;
            channel.carrier_frequency = o.carrier_frequency;
            if (o.coherence_time)
                channel.coherence_time = *o.coherence_time;
            const FeasibilityReport r = feasibility(channel, o.rolloff, o.observation_time);

            out << "coherence time T_c       " << fixed(r.coherence_time * 1e6, 3) << " us\n"
                << "observation time T_obs   " << fixed(r.observation_time * 1e6, 3) << " us\n"
                << "bandwidth interval       [" << fixed(r.bandwidth_min, 1) << ", " << fixed(r.bandwidth_max, 1)
                << "] Hz\n"
                << "chosen bandwidth B       " << fixed(r.bandwidth, 1) << " Hz\n"
                << "sampling interval T      " << fixed(r.sampling_interval * 1e6, 3) << " us\n"
                << "snapshots N              " << r.snapshots << '\n';

            StationarityGeometry geom;
            geom.element_count = o.elements;
            geom.carrier_frequency = o.carrier_frequency;
            for (double d : o.distances)
            {
                const double t = stationarity_time(d, kmh2ms(o.speed_kmh), o.kappa, geom);
                out << "stationarity at " << fixed(d, 1) << " m, " << fixed(o.speed_kmh, 1) << " km/h: "
                    << fixed(t * 1e3, 2) << " ms\n";
            }

            if (!o.out_dir.empty() || std::getenv("PMLDPE_OUT_DIR"))
            {
                std::vector<double> rolloffs{0.0, 0.5, 1.0};
                if (std::find(rolloffs.begin(), rolloffs.end(), o.rolloff) == rolloffs.end())
                    rolloffs.push_back(o.rolloff);
                std::ostringstream os;
                os << "rolloff,bandwidth_hz,sampling_interval_s\n";
                for (const auto &s : sampling_interval_curve(channel, rolloffs, o.curve_points))
                    os << csv_number(s.rolloff) << ',' << csv_number(s.bandwidth) << ','
                       << csv_number(s.sampling_interval) << '\n';
                const std::string path = join(o.out_dir.empty() ? default_out_dir() : o.out_dir,
                                              "sampling_interval.csv");
                write_file(path, os.str());
                out << "wrote " << path << '\n';
            }
            return 0;
        }

        int run_spectrum(const CliOptions &o, std::ostream &out)
        {
            const ScenarioConfig scenario = load_with_flags(o);
            const std::uint64_t seed =
                trial_seed(scenario.master_seed, static_cast<std::uint64_t>(scenario.first_trial));
            const TrialData data = simulate_trial_data(scenario, seed);
            if (o.step < 1 || static_cast<std::size_t>(o.step) > data.observations.size())
                throw Error("spectrum: step must lie in [1, " + std::to_string(data.observations.size()) + "]");

            const ArrayConfig cfg = scenario.array();
            const Observation &obs = data.observations[static_cast<std::size_t>(o.step - 1)];
            const AngularGrid grid(scenario.spectrum_points);
            const AoaEstimateSet est =
                estimate_aoas(obs.samples, obs.symbols, effective_model_order(scenario.d_max, cfg), grid, cfg);

            std::ostringstream os;
            write_stamp(os, {scenario.name, config_hash(scenario), scenario.master_seed});
            write_pseudospectrum_csv(os, est.pseudospectrum, grid);
            const std::string dir = o.out_dir.empty() ? default_out_dir() : o.out_dir;
            const std::string path = join(dir, "spectrum_" + scenario.name + "_" + std::to_string(o.step) + ".csv");
            write_file(path, os.str());

            const auto &link = data.links[static_cast<std::size_t>(o.step - 1)];
            const LocalAoa los = global_to_local(link.los_aoa, heading_of(data.truth.true_velocities[o.step]));
            out << "step " << o.step << "  t " << fixed(obs.timestamp, 4) << " s  bs " << obs.bs_id << "  paths "
                << link.path_count() << (link.los_blocked ? "  (LOS blocked)" : "") << '\n'
                << "true LOS angle " << fixed(rad2deg(los.radians()), 2) << " deg\n"
                << "estimated angles (deg, by peak height):";
            for (const auto &a : est.angles)
                out << ' ' << fixed(rad2deg(a.radians()), 2);
            out << '\n' << "wrote " << path << '\n';
            return 0;
        }

        int run_validate(const CliOptions &o, std::ostream &out)
        {
            const std::string dir = o.preset_dir.empty() ? std::string(PMLDPE_PRESET_DIR) : o.preset_dir;
            std::vector<CheckResult> results = run_core_checks();
            std::vector<fs::path> files;
            if (fs::is_directory(dir))
                for (const auto &entry : fs::directory_iterator(dir))
                    if (entry.path().extension() == ".ini")
                        files.push_back(entry.path());
            std::sort(files.begin(), files.end());
            if (files.empty())
                results.push_back({"presets found in " + dir, false, "no .ini files"});
            for (const auto &f : files)
            {
                try
                {
                    const auto more = run_scenario_checks(load_scenario(f.string()));
                    results.insert(results.end(), more.begin(), more.end());
                }
                catch (const std::exception &e)
                {
                    results.push_back({"[" + f.filename().string() + "] load", false, e.what()});
                }
            }
            const bool ok = report(out, results);
            out << (ok ? "all checks passed\n" : "some checks failed\n");
            return ok ? 0 : 1;
        }
    }

    std::string default_out_dir()
    {
        const char *env = std::getenv("PMLDPE_OUT_DIR");
        return env && *env ? std::string(env) : std::string("results");
    }

    CliOptions parse_args(int argc, const char *const *argv)
    {
        CliOptions o;
        CLI::App app{"Direct position estimation of a moving array receiver from multipath observations", "pmldpe"};
        app.require_subcommand(1);

        auto *sim = app.add_subcommand("simulate", "Monte Carlo RMSE of the position estimators for a scenario");
        sim->add_option("--scenario", o.scenario, "Scenario INI file")->required()->check(CLI::ExistingFile);
        sim->add_option("--out", o.out_dir, "Output directory (default $PMLDPE_OUT_DIR or ./results)");
        sim->add_option("--set", o.overrides, "Override a setting, section.key=value (repeatable)");
        sim->add_option("--seed", o.seed, "Master seed");
        sim->add_option("--trials", o.trials, "Number of trials")->check(CLI::PositiveNumber);
        sim->add_option("--traces", o.traces, "Write per-step traces for the first N trials")
            ->check(CLI::NonNegativeNumber);
        sim->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
        sim->add_flag("--quiet", o.quiet, "No progress output");

        auto *feas = app.add_subcommand("feasibility", "Sampling feasibility and LOS stationarity");
        feas->add_option("--bd", o.doppler_spread, "Doppler spread B_D in Hz")->check(CLI::PositiveNumber);
        feas->add_option("--bc", o.coherence_bandwidth, "Coherence bandwidth B_c in Hz")->check(CLI::PositiveNumber);
        feas->add_option("--alpha", o.rolloff, "Roll-off factor")->check(CLI::Range(0.0, 1.0));
        feas->add_option("--tobs", o.observation_time, "Observation time in s")->check(CLI::PositiveNumber);
        feas->add_option("--tc", o.coherence_time, "Coherence time in s (default 1/B_D)")->check(CLI::PositiveNumber);
        feas->add_option("--distance", o.distances, "Distances for the stationarity time in m (repeatable)");
        feas->add_option("--speed", o.speed_kmh, "Speed for the stationarity time in km/h");
        feas->add_option("--kappa", o.kappa, "Steering drift threshold")->check(CLI::PositiveNumber);
        feas->add_option("--elements", o.elements, "Array elements")->check(CLI::PositiveNumber);
        feas->add_option("--fc", o.carrier_frequency, "Carrier frequency in Hz")->check(CLI::PositiveNumber);
        feas->add_option("--points", o.curve_points, "Samples per T(B) curve")->check(CLI::Range(2, 100000));
        feas->add_option("--out", o.out_dir, "Directory for the T(B) CSV");

        auto *spectrum_cmd = app.add_subcommand("spectrum", "Pseudospectrum of one simulated observation");
        spectrum_cmd->add_option("--scenario", o.scenario, "Scenario INI file")->required()->check(CLI::ExistingFile);
        spectrum_cmd->add_option("--out", o.out_dir, "Output directory");
        spectrum_cmd->add_option("--set", o.overrides, "Override a setting, section.key=value (repeatable)");
        spectrum_cmd->add_option("--seed", o.seed, "Master seed");
        spectrum_cmd->add_option("--step", o.step, "Observation index, 1-based")->check(CLI::PositiveNumber);

        auto *val = app.add_subcommand("validate", "Run invariant and oracle checks on the shipped presets");
        val->add_option("--presets", o.preset_dir, "Preset directory")->check(CLI::ExistingDirectory);

        try
        {
            app.parse(argc, argv);
        }
        catch (const CLI::CallForHelp &e)
        {
            std::ostringstream help, ignored;
            app.exit(e, help, ignored);
            throw UsageError(help.str(), 0);
        }
        catch (const CLI::ParseError &e)
        {
            std::string msg = e.what();
            if (msg.empty())
                msg = e.get_name();
            throw UsageError(msg + "\nRun with --help for usage.", 2);
        }

        if (sim->parsed())
            o.command = Command::simulate;
        else if (feas->parsed())
            o.command = Command::feasibility;
        else if (spectrum_cmd->parsed())
            o.command = Command::spectrum;
        else
            o.command = Command::validate;
        return o;
    }

    int execute(const CliOptions &options, std::ostream &out, std::ostream &err)
    {
        try
        {
            switch (options.command)
            {
            case Command::simulate:
                return run_simulate(options, out, err);
            case Command::feasibility:
                return run_feasibility(options, out);
            case Command::spectrum:
                return run_spectrum(options, out);
            case Command::validate:
                return run_validate(options, out);
            }
        }
        catch (const std::exception &e)
        {
            err << "error: " << e.what() << '\n';
        }
        return 1;
    }

    int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
    {
        CliOptions options;
        try
        {
            options = parse_args(argc, argv);
        }
        catch (const UsageError &e)
        {
            (e.exit_code() == 0 ? out : err) << e.what() << (e.exit_code() == 0 ? "" : "\n");
            return e.exit_code();
        }
        return execute(options, out, err);
    }
}
