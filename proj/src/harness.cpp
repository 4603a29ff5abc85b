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

#include "pmldpe/harness.hpp"

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace pmldpe
{
    void ScenarioConfig::validate() const
    {
        auto fail = [](const std::string &what) { throw Error("scenario: " + what); };
        if (bs_positions.empty())
            fail("at least one BS position is required");
        if (!(bs_rate > 0.0))
            fail("bs_rate must be positive");
        if (!(duration > 0.0))
            fail("duration must be positive");
        if (trials < 1)
            fail("trials must be at least 1");
        if (first_trial < 0)
            fail("first_trial must be non-negative");
        if (d_max < 0)
            fail("d_max must be non-negative");
        if (path_count.min < 0 || path_count.max < path_count.min)
            fail("path count range must satisfy 0 <= min <= max");
        if (!(p_nlos >= 0.0 && p_nlos <= 1.0))
            fail("p_nlos must lie in [0, 1]");
        if (!(velocity_noise_fraction >= 0.0))
            fail("velocity_noise_fraction must be non-negative");
        if (snapshots < 1)
            fail("snapshots must be at least 1");
        if (!(rolloff >= 0.0 && rolloff <= 1.0))
            fail("rolloff must lie in [0, 1]");
        if (!(observation_time > 0.0))
            fail("observation_time must be positive");
        if (noise_power && !(*noise_power >= 0.0))
            fail("noise_power must be non-negative");
        if (!(association_tolerance > 0.0))
            fail("association tolerance must be positive");
        if (spectrum_points < 3)
            fail("spectrum_points must be at least 3");
        if (!(grid.spacing > 0.0))
            fail("grid spacing must be positive");
        if (!(mobility.start_speed >= 0.0 && mobility.peak_speed >= 0.0))
            fail("speeds must be non-negative");
        channel.validate();
        (void)array();
    }

    ArrayConfig ScenarioConfig::array() const
    {
        return ArrayConfig(element_count, subarray_length, channel.carrier_frequency);
    }

    double ScenarioConfig::effective_noise_power() const
    {
        if (noise_power)
            return *noise_power;
        return thermal_noise_power(feasibility(channel, rolloff, observation_time).bandwidth);
    }

    std::vector<std::pair<double, int>> event_schedule(double duration, double bs_rate, int bs_count)
    {
        if (!(duration > 0.0) || !(bs_rate > 0.0) || bs_count < 1)
            throw Error("event_schedule: duration, rate and BS count must be positive");
        std::vector<std::pair<double, int>> events;
        const double slack = 1e-9 * duration;
        for (int b = 0; b < bs_count; ++b)
            for (long j = 0;; ++j)
            {
                const double t = (j + (b + 1.0) / bs_count) / bs_rate;
                if (t > duration + slack)
                    break;
                events.emplace_back(t, b);
            }
        std::sort(events.begin(), events.end());
        return events;
    }

    double profile_speed(const MobilityParams &m, double duration, double t)
    {
        const double third = duration / 3.0;
        if (t <= third)
            return m.start_speed + (m.peak_speed - m.start_speed) * t / third;
        if (t <= 2.0 * third)
            return m.peak_speed;
        return m.peak_speed - (m.peak_speed - m.start_speed) * std::min(1.0, (t - 2.0 * third) / third);
    }

    namespace
    {
        struct Kinematic
        {
            double x, y, heading;
        };

        Kinematic derivative(const MobilityParams &m, double duration, double t, const Kinematic &s)
        {
            const double v = profile_speed(m, duration, t);
            const double turn = v > 0.0 ? -m.lateral_acceleration / v : 0.0;
            return {v * std::cos(s.heading), v * std::sin(s.heading), turn};
        }

        Kinematic rk4(const MobilityParams &m, double duration, double t, const Kinematic &s, double h)
        {
            auto axpy = [](const Kinematic &a, double c, const Kinematic &b)
            { return Kinematic{a.x + c * b.x, a.y + c * b.y, a.heading + c * b.heading}; };
            const Kinematic k1 = derivative(m, duration, t, s);
            const Kinematic k2 = derivative(m, duration, t + 0.5 * h, axpy(s, 0.5 * h, k1));
            const Kinematic k3 = derivative(m, duration, t + 0.5 * h, axpy(s, 0.5 * h, k2));
            const Kinematic k4 = derivative(m, duration, t + h, axpy(s, h, k3));
            return {s.x + h / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
                    s.y + h / 6.0 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y),
                    s.heading + h / 6.0 * (k1.heading + 2 * k2.heading + 2 * k3.heading + k4.heading)};
        }

        Velocity velocity_at(const MobilityParams &m, double duration, double t, double heading)
        {
            const double v = profile_speed(m, duration, t);
            return {v * std::cos(heading), v * std::sin(heading)};
        }

        Velocity measure(Rng &rng, const Velocity &v, double fraction)
        {
            boost::random::normal_distribution<double> n(0.0, 1.0);
            const double ex = n(rng), ey = n(rng);
            return {v.vx + fraction * std::abs(v.vx) * ex, v.vy + fraction * std::abs(v.vy) * ey};
        }
    }

    TruthTrajectory mobility_profile(const ScenarioConfig &config, Rng &rng)
    {
        if (!(config.duration > 0.0))
            throw Error("mobility_profile: duration must be positive");
        const auto &m = config.mobility;
        const auto events =
            event_schedule(config.duration, config.bs_rate, static_cast<int>(config.bs_positions.size()));

        TruthTrajectory out;
        Kinematic state{m.initial_position.x, m.initial_position.y, m.initial_heading};
        double t = 0.0;
        auto record = [&](double time, int bs)
        {
            out.times.push_back(time);
            out.bs_ids.push_back(bs);
            out.positions.push_back({state.x, state.y});
            const Velocity v = velocity_at(m, config.duration, time, state.heading);
            out.true_velocities.push_back(v);
            out.measured_velocities.push_back(measure(rng, v, config.velocity_noise_fraction));
        };
        record(0.0, -1);

        constexpr double max_step = 1e-3;
        for (const auto &[te, bs] : events)
        {
            while (t < te)
            {
                const double h = std::min(max_step, te - t);
                state = rk4(m, config.duration, t, state, h);
                t = (te - t <= max_step) ? te : t + h;
            }
            record(te, bs);
        }
        return out;
    }

    std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index)
    {
        // splitmix64 finaliser applied to master + golden-ratio increment per trial
        std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ULL * (trial_index + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    TrialData simulate_trial_data(const ScenarioConfig &scenario, std::uint64_t seed)
    {
        scenario.validate();
        const ArrayConfig cfg = scenario.array();
        const double noise = scenario.effective_noise_power();

        Rng mobility_rng(trial_seed(seed, 1));
        Rng channel_rng(trial_seed(seed, 2));
        TrialData data;
        data.truth = mobility_profile(scenario, mobility_rng);
        const TruthTrajectory &truth = data.truth;

        boost::random::bernoulli_distribution<double> blocked(scenario.p_nlos);
        boost::random::uniform_int_distribution<int> paths(scenario.path_count.min, scenario.path_count.max);

        data.observations.reserve(truth.steps());
        data.links.reserve(truth.steps());
        for (std::size_t k = 1; k <= truth.steps(); ++k)
        {
            const int bs_id = truth.bs_ids[k];
            const Position &bs = scenario.bs_positions[static_cast<std::size_t>(bs_id)];
            const Position &ms = truth.positions[k];
            const bool is_blocked = blocked(channel_rng);
            const int path_count = paths(channel_rng);
            MultipathRealization link = sample_multipath(channel_rng, scenario.channel, path_count, distance(bs, ms),
                                                         los_bearing(bs, ms), is_blocked);
            Observation obs = generate_observation(channel_rng, link, heading_of(truth.true_velocities[k]), cfg,
                                                   scenario.snapshots, noise);
            obs.timestamp = truth.times[k];
            obs.bs_id = bs_id;
            data.observations.push_back(std::move(obs));
            data.links.push_back(std::move(link));
        }
        return data;
    }

    MotionHistory measured_history(const ScenarioConfig &scenario, const TruthTrajectory &truth)
    {
        MotionHistory history(GlobalBearing(scenario.mobility.initial_heading));
        for (std::size_t k = 0; k < truth.times.size(); ++k)
            history.push(truth.times[k], truth.measured_velocities[k]);
        return history;
    }

    TrialResult run_trial(const ScenarioConfig &scenario, std::uint64_t seed)
    {
        TrialResult result;
        result.seed = seed;
        result.estimators = scenario.estimators;
        const TrialData data = simulate_trial_data(scenario, seed);
        if (scenario.estimators.empty())
            return result;

        const ArrayConfig cfg = scenario.array();
        const TruthTrajectory &truth = data.truth;
        PseudoMlOptions pml;
        pml.association_tolerance = scenario.association_tolerance;
        pml.d_max = scenario.d_max;
        pml.grid = AngularGrid(scenario.spectrum_points);

        const std::vector<Position> grid = make_grid(scenario.grid);
        std::vector<GridState> states(scenario.estimators.size(), GridState(grid));

        MotionHistory history(GlobalBearing(scenario.mobility.initial_heading));
        history.push(truth.times[0], truth.measured_velocities[0]);

        for (std::size_t k = 1; k <= truth.steps(); ++k)
        {
            try
            {
                const Observation &obs = data.observations[k - 1];
                const Position &bs = scenario.bs_positions[static_cast<std::size_t>(obs.bs_id)];
                const Position &ms = truth.positions[k];
                history.push(truth.times[k], truth.measured_velocities[k]);

                StepRecord rec;
                rec.step = static_cast<int>(k);
                rec.time = truth.times[k];
                rec.bs_id = obs.bs_id;
                rec.truth = ms;
                for (std::size_t e = 0; e < scenario.estimators.size(); ++e)
                {
                    PositionEstimate est;
                    switch (scenario.estimators[e])
                    {
                    case EstimatorKind::pseudo_ml:
                        est = pseudo_ml_step(states[e], obs, history, bs, pml, cfg);
                        break;
                    case EstimatorKind::max_power:
                        est = max_power_step(states[e], obs, history, bs, cfg);
                        break;
                    case EstimatorKind::single_path:
                        est = single_path_step(states[e], obs, history, bs, cfg);
                        break;
                    }
                    rec.estimates.push_back({est, distance(est.current, ms)});
                }
                result.steps.push_back(std::move(rec));
            }
            catch (const std::exception &ex)
            {
                throw Error("trial seed " + std::to_string(seed) + ", step " + std::to_string(k) + ": " + ex.what());
            }
        }
        return result;
    }

    std::size_t RmseSeries::index_of(EstimatorKind kind) const
    {
        const auto it = std::find(estimators.begin(), estimators.end(), kind);
        if (it == estimators.end())
            throw Error("RMSE series has no estimator " + to_string(kind));
        return static_cast<std::size_t>(it - estimators.begin());
    }

    double RmseSeries::mean_rmse_after(EstimatorKind kind, double from) const
    {
        const auto &series = rmse[index_of(kind)];
        double sum = 0.0;
        int count = 0;
        for (std::size_t k = 0; k < times.size(); ++k)
            if (times[k] >= from - 1e-9)
            {
                sum += series[k];
                ++count;
            }
        if (count == 0)
            throw Error("mean_rmse_after: no steps at or after t = " + std::to_string(from));
        return sum / count;
    }

    namespace
    {
        void finish(RmseSeries &s)
        {
            s.rmse = s.squared_error_sum;
            for (auto &row : s.rmse)
                for (auto &v : row)
                    v = std::sqrt(v / s.trials);
        }
    }

    RmseSeries aggregate(const std::vector<TrialResult> &trials)
    {
        if (trials.empty())
            throw Error("aggregate: no trials");
        RmseSeries s;
        s.estimators = trials.front().estimators;
        s.trials = static_cast<int>(trials.size());
        for (const auto &st : trials.front().steps)
            s.times.push_back(st.time);
        s.squared_error_sum.assign(s.estimators.size(), std::vector<double>(s.times.size(), 0.0));
        for (const auto &tr : trials)
        {
            if (tr.steps.size() != s.times.size() || tr.estimators != s.estimators)
                throw Error("aggregate: trials have inconsistent shapes");
            for (std::size_t k = 0; k < tr.steps.size(); ++k)
                for (std::size_t e = 0; e < s.estimators.size(); ++e)
                {
                    const double err = tr.steps[k].estimates[e].error;
                    s.squared_error_sum[e][k] += err * err;
                }
        }
        finish(s);
        return s;
    }

    RmseSeries pool(const RmseSeries &a, const RmseSeries &b)
    {
        if (a.times != b.times || a.estimators != b.estimators)
            throw Error("pool: series have different shapes");
        RmseSeries s = a;
        s.trials = a.trials + b.trials;
        for (std::size_t e = 0; e < s.estimators.size(); ++e)
            for (std::size_t k = 0; k < s.times.size(); ++k)
                s.squared_error_sum[e][k] += b.squared_error_sum[e][k];
        finish(s);
        return s;
    }

    RmseSeries run_monte_carlo(const ScenarioConfig &scenario, const MonteCarloOptions &options)
    {
        scenario.validate();
        const int total = scenario.trials;
        std::vector<TrialResult> results(static_cast<std::size_t>(total));

        unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
        threads = std::min<unsigned>(threads, static_cast<unsigned>(total));

        std::atomic<int> next{0};
        std::atomic<int> done{0};
        std::exception_ptr failure;
        std::mutex mutex;
        auto worker = [&]
        {
            for (;;)
            {
                const int i = next.fetch_add(1);
                if (i >= total)
                    return;
                try
                {
                    const auto index = static_cast<std::uint64_t>(scenario.first_trial + i);
                    results[static_cast<std::size_t>(i)] = run_trial(scenario, trial_seed(scenario.master_seed, index));
                }
                catch (...)
                {
                    std::lock_guard lock(mutex);
                    if (!failure)
                        failure = std::current_exception();
                    next.store(total);
                    return;
                }
                const int d = done.fetch_add(1) + 1;
                if (options.progress)
                {
                    std::lock_guard lock(mutex);
                    options.progress(d, total);
                }
            }
        };

        if (threads <= 1)
            worker();
        else
        {
            std::vector<std::jthread> pool_threads;
            for (unsigned t = 0; t < threads; ++t)
                pool_threads.emplace_back(worker);
        }
        if (failure)
            std::rethrow_exception(failure);

        if (options.on_trial)
            for (int i = 0; i < total; ++i)
                options.on_trial(scenario.first_trial + i, results[static_cast<std::size_t>(i)]);

        if (scenario.estimators.empty())
        {
            RmseSeries empty;
            empty.trials = total;
            return empty;
        }
        return aggregate(results);
    }

    double stationarity_time(double distance, double speed, double kappa, const StationarityGeometry &geometry)
    {
        if (!(distance > 0.0))
            throw Error("stationarity_time: distance must be positive");
        if (!(kappa > 0.0))
            throw Error("stationarity_time: kappa must be positive");
        if (speed < 0.0)
            throw Error("stationarity_time: speed must be non-negative");
        if (!(geometry.miss_distance >= 0.0 && geometry.miss_distance < distance))
            throw Error("stationarity_time: miss distance must lie in [0, distance)");
        if (speed == 0.0)
            return stationarity_cap;

        const ArrayConfig cfg(geometry.element_count, geometry.element_count, geometry.carrier_frequency);
        const Position bs{std::sqrt(distance * distance - geometry.miss_distance * geometry.miss_distance),
                          geometry.miss_distance};
        const GlobalBearing heading(0.0);
        auto response = [&](double t)
        {
            const Position ms{speed * t, 0.0};
            if (ms == bs)
                return steering(LocalAoa(0.0), cfg.element_count(), cfg);
            return steering(global_to_local(los_bearing(bs, ms), heading), cfg.element_count(), cfg);
        };
        const ComplexVector start = response(0.0);
        auto within = [&](double dt) { return (response(dt) - start).norm() <= kappa; };

        double lo = 0.0, hi = 1e-6;
        while (within(hi))
        {
            lo = hi;
            hi *= 2.0;
            if (hi > stationarity_cap)
                return stationarity_cap;
        }
        for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it)
        {
            const double mid = 0.5 * (lo + hi);
            (within(mid) ? lo : hi) = mid;
        }
        return lo;
    }

    double sampling_interval(double bandwidth, double rolloff)
    {
        if (!(bandwidth > 0.0))
            throw Error("sampling_interval: bandwidth must be positive");
        return (1.0 + rolloff) / (2.0 * bandwidth);
    }

    int snapshots_at(double bandwidth, double rolloff, double observation_time)
    {
        // the relative nudge keeps exact ratios such as 0.3 / 0.02 from flooring one short
        return static_cast<int>(std::floor(observation_time / sampling_interval(bandwidth, rolloff) * (1.0 + 1e-12)));
    }

    FeasibilityReport feasibility(const ChannelParams &channel, double rolloff, double observation_time)
    {
        if (!(rolloff >= 0.0 && rolloff <= 1.0))
            throw Error("feasibility: roll-off must lie in [0, 1]");
        if (!(observation_time > 0.0))
            throw Error("feasibility: observation time must be positive");
        channel.validate();

        FeasibilityReport r;
        r.rolloff = rolloff;
        r.observation_time = observation_time;
        r.coherence_time = channel.effective_coherence_time();
        if (observation_time > r.coherence_time * (1.0 + 1e-12))
            throw Error("feasibility: T_obs <= T_c violated (T_obs = " + std::to_string(observation_time) +
                        " s, T_c = " + std::to_string(r.coherence_time) + " s)");
        r.bandwidth_min = feasibility_margin * channel.doppler_spread;
        r.bandwidth_max = channel.coherence_bandwidth * (1.0 + rolloff) / feasibility_margin;
        if (r.bandwidth_min > r.bandwidth_max)
            throw Error("feasibility: B >> B_D and B << B_c(1+alpha) cannot hold together (need B >= " +
                        std::to_string(r.bandwidth_min) + " Hz and B <= " + std::to_string(r.bandwidth_max) + " Hz)");
        r.bandwidth = r.bandwidth_max;
        r.sampling_interval = sampling_interval(r.bandwidth, rolloff);
        r.snapshots = snapshots_at(r.bandwidth, rolloff, observation_time);
        if (r.snapshots < 1)
            throw Error("feasibility: T_obs is shorter than one sampling interval");
        return r;
    }

    std::vector<IntervalSample> sampling_interval_curve(const ChannelParams &channel, const std::vector<double> &rolloffs,
                                                        int points_per_curve)
    {
        if (points_per_curve < 2)
            throw Error("sampling_interval_curve: at least two points per curve are required");
        std::vector<IntervalSample> out;
        for (double a : rolloffs)
        {
            const double lo = feasibility_margin * channel.doppler_spread;
            const double hi = channel.coherence_bandwidth * (1.0 + a) / feasibility_margin;
            if (lo > hi)
                continue;
            for (int i = 0; i < points_per_curve; ++i)
            {
                const double b = lo + (hi - lo) * i / (points_per_curve - 1);
                out.push_back({a, b, sampling_interval(b, a)});
            }
        }
        return out;
    }
}
