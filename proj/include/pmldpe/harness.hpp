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

#ifndef PMLDPE_HARNESS_HPP
#define PMLDPE_HARNESS_HPP

#include "pmldpe/channel.hpp"
#include "pmldpe/estimators.hpp"
#include "pmldpe/geometry.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pmldpe
{
    // Accelerate for the first third, cruise for the second, decelerate for the last, while a
    // constant lateral acceleration bends the path (positive values turn right).
    struct MobilityParams
    {
        Position initial_position{13.0, 7.0};
        double initial_heading = 0.0;          // rad
        double start_speed = kmh2ms(25.0);     // m/s
        double peak_speed = kmh2ms(50.0);      // m/s
        double lateral_acceleration = 0.025;   // m/s^2
    };

    // D_i ~ U{min, max}
    struct PathCountLaw
    {
        int min = 10;
        int max = 15;
    };

    struct ScenarioConfig
    {
        std::string name = "scenario";
        std::vector<Position> bs_positions;
        MobilityParams mobility;
        double bs_rate = 10.0;  // Hz, per BS
        double duration = 8.0;  // s

        int element_count = 64;
        int subarray_length = 32;
        ChannelParams channel;

        int d_max = 15;
        PathCountLaw path_count;
        double p_nlos = 0.1;
        double velocity_noise_fraction = 0.1;
        int snapshots = 16;
        double rolloff = 0.0;
        double observation_time = 325e-6;  // s
        std::optional<double> noise_power; // W; thermal k_B T_0 B when unset

        int trials = 200;
        std::uint64_t master_seed = 1;
        int first_trial = 0;

        GridSpec grid{{13.0, 7.0}, 20.0, 20.0, 0.5};
        double association_tolerance = deg2rad(2.0);
        int spectrum_points = 2048;
        std::vector<EstimatorKind> estimators{EstimatorKind::pseudo_ml, EstimatorKind::max_power,
                                              EstimatorKind::single_path};

        // Throws Error naming the offending field
        void validate() const;

        ArrayConfig array() const;

        // Configured noise power, or k_B T_0 B at the bandwidth chosen by `feasibility`
        double effective_noise_power() const;
    };

    // State of the MS at every event time t_0 = 0, t_1, ..., t_K
    struct TruthTrajectory
    {
        std::vector<double> times;
        std::vector<int> bs_ids; // entry 0 is -1 (start instant, no reception)
        std::vector<Position> positions;
        std::vector<Velocity> true_velocities;
        std::vector<Velocity> measured_velocities;

        std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
    };

    // Event times of all BS transmissions: BS b sends at (j + (b + 1) / N_BS) / R_BS, j = 0, 1, ...
    std::vector<std::pair<double, int>> event_schedule(double duration, double bs_rate, int bs_count);

    // Speed modulus of the piecewise profile at time t
    double profile_speed(const MobilityParams &mobility, double duration, double t);

    // True and measured kinematics at every event time; measured velocity noise has standard
    // deviation fraction * |true component|, independent per step and component.
    TruthTrajectory mobility_profile(const ScenarioConfig &config, Rng &rng);

    struct EstimateRecord
    {
        PositionEstimate estimate;
        double error = 0.0; // ||p_hat(t_k) - p(t_k)||
    };

    struct StepRecord
    {
        int step = 0;
        double time = 0.0;
        int bs_id = 0;
        Position truth;
        std::vector<EstimateRecord> estimates; // same order as ScenarioConfig::estimators
    };

    struct TrialResult
    {
        std::uint64_t seed = 0;
        std::vector<EstimatorKind> estimators;
        std::vector<StepRecord> steps;
    };

    // Deterministic per-trial seed derived from the master seed (splitmix64 mixing)
    std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index);

    // Ground truth plus every received observation of one trial; observations[k - 1] belongs to step k
    struct TrialData
    {
        TruthTrajectory truth;
        std::vector<Observation> observations;
        std::vector<MultipathRealization> links;
    };

    TrialData simulate_trial_data(const ScenarioConfig &scenario, std::uint64_t seed);

    // Measured velocities of a trial as seen by the estimators, t_0 .. t_K
    MotionHistory measured_history(const ScenarioConfig &scenario, const TruthTrajectory &truth);

    TrialResult run_trial(const ScenarioConfig &scenario, std::uint64_t seed);

    struct RmseSeries
    {
        std::vector<double> times;
        std::vector<EstimatorKind> estimators;
        std::vector<std::vector<double>> squared_error_sum; // [estimator][step]
        std::vector<std::vector<double>> rmse;              // [estimator][step]
        int trials = 0;

        // Mean RMSE of one estimator over steps with t >= from
        double mean_rmse_after(EstimatorKind kind, double from) const;
        std::size_t index_of(EstimatorKind kind) const;
    };

    // Aggregate already-computed trials
    RmseSeries aggregate(const std::vector<TrialResult> &trials);

    // Combines two series built on disjoint trial sets of the same scenario
    RmseSeries pool(const RmseSeries &a, const RmseSeries &b);

    struct MonteCarloOptions
    {
        unsigned threads = 0; // 0 = hardware concurrency
        std::function<void(int done, int total)> progress;
        std::function<void(int trial_index, const TrialResult &)> on_trial;
    };

    // Runs trials first_trial .. first_trial + trials - 1
    RmseSeries run_monte_carlo(const ScenarioConfig &scenario, const MonteCarloOptions &options = {});

    // Straight constant-speed approach that misses the BS laterally by `miss_distance`, array
    // normal along the direction of motion.
    struct StationarityGeometry
    {
        double miss_distance = 0.06; // m
        int element_count = 64;
        double carrier_frequency = 5.9e9;
    };

    inline constexpr double stationarity_cap = 3600.0; // s, returned when the LOS never drifts by kappa

    // Largest dT such that ||a(theta_t) - a(theta_{t+dT})|| <= kappa, found by bracketing and bisection
    double stationarity_time(double distance, double speed, double kappa, const StationarityGeometry &geometry = {});

    struct FeasibilityReport
    {
        double coherence_time = 0.0;   // T_c, s
        double observation_time = 0.0; // T_obs, s
        double bandwidth_min = 0.0;    // Hz, from B >> B_D
        double bandwidth_max = 0.0;    // Hz, from B << B_c (1 + alpha)
        double bandwidth = 0.0;        // Hz, the choice that minimises T
        double sampling_interval = 0.0;// T = (1 + alpha) / (2 B), s
        int snapshots = 0;             // floor(T_obs / T)
        double rolloff = 0.0;
    };

    inline constexpr double feasibility_margin = 10.0; // factor used for ">>" and "<<"

    // Throws Error naming the violated constraint
    FeasibilityReport feasibility(const ChannelParams &channel, double rolloff, double observation_time);

    // T = (1 + alpha) / (2 B)
    double sampling_interval(double bandwidth, double rolloff);

    // floor(T_obs / T) at a given bandwidth
    int snapshots_at(double bandwidth, double rolloff, double observation_time);

    struct IntervalSample
    {
        double rolloff;
        double bandwidth;
        double sampling_interval;
    };

    // T(B) over the allowed bandwidth interval for each roll-off
    std::vector<IntervalSample> sampling_interval_curve(const ChannelParams &channel, const std::vector<double> &rolloffs,
                                                        int points_per_curve);
}

#endif
