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

#ifndef PMLDPE_ESTIMATORS_HPP
#define PMLDPE_ESTIMATORS_HPP

#include "pmldpe/channel.hpp"
#include "pmldpe/geometry.hpp"
#include "pmldpe/spectral.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pmldpe
{
    enum class EstimatorKind
    {
        pseudo_ml,
        max_power,
        single_path,
    };

    std::string to_string(EstimatorKind kind);
    EstimatorKind estimator_from_string(const std::string &name);

    // Uniform rectangular grid of initial-position hypotheses
    struct GridSpec
    {
        Position center;
        double half_width_x = 20.0; // m
        double half_width_y = 20.0; // m
        double spacing = 0.5;       // m
    };

    // Row-major: x varies fastest
    std::vector<Position> make_grid(const GridSpec &spec);

    struct GridState
    {
        std::vector<Position> points;
        std::vector<double> scores;
        std::vector<int> non_associations;
        int step = 0;

        explicit GridState(std::vector<Position> grid_points);

        std::size_t size() const { return points.size(); }

        // Points with the minimum number of non-associations
        std::vector<std::size_t> candidates() const;
    };

    struct MotionSample
    {
        double time = 0.0;
        Velocity velocity; // measured at `time`, held until the next sample
    };

    // Measured velocities read at t_0, t_1, ..., t_k
    class MotionHistory
    {
    public:
        MotionHistory() = default;
        explicit MotionHistory(GlobalBearing initial_heading) : initial_heading_(initial_heading) {}

        void push(double time, const Velocity &measured);

        std::size_t size() const { return samples_.size(); }
        const MotionSample &operator[](std::size_t i) const { return samples_[i]; }

        // Constant-velocity segments [t_{i-1}, t_i) for i = 1..k
        std::vector<VelocitySegment> segments(std::size_t k) const;

        // sum_{i=1..k} v(t_{i-1}) (t_i - t_{i-1})
        Position displacement(std::size_t k) const;

        // Heading from v(t_k), reusing the last valid heading for zero velocity
        GlobalBearing heading(std::size_t k) const;

    private:
        std::vector<MotionSample> samples_;
        GlobalBearing initial_heading_;
    };

    struct PositionEstimate
    {
        EstimatorKind estimator = EstimatorKind::pseudo_ml;
        int step = 0;
        double time = 0.0;
        Position initial;
        Position current;
        std::size_t candidate_count = 0;
    };

    // Rank-one projector x x^H / ||x||^2
    struct ProjectorEstimate
    {
        ComplexMatrix matrix;

        static ProjectorEstimate from_vector(const ComplexVector &x);
    };

    // ||P ybar||^2 / cbar
    double compressed_score(const ProjectorEstimate &projector, const ComplexVector &ybar, double cbar);

    // ybar = sum_n y_n conj(c_n)
    ComplexVector matched_sum(const Observation &obs);

    // Trial LOS angle in the array frame for a hypothesised initial position at step k
    LocalAoa trial_angle(const Position &p0, const Position &displacement, const Position &bs,
                         GlobalBearing heading);

    struct PseudoMlOptions
    {
        double association_tolerance = deg2rad(2.0); // delta, rad
        int d_max = 15;
        AngularGrid grid{2048};
    };

    // D_max + 1 clamped to P - 1 so that a noise subspace remains
    int effective_model_order(int d_max, const ArrayConfig &cfg);

    /// Everything the pseudo-ML update needs from one observation, independent of the grid point.
    struct PseudoMlObservation
    {
        AoaEstimateSet aoas;
        ComplexVector ybar;
        double cbar = 0.0;
        // Full-array NLOS reconstruction when path s is taken as the LOS: sum_{j != s} alpha_j a(theta_j)
        std::vector<ComplexVector> complement;

        PseudoMlObservation(const Observation &obs, const PseudoMlOptions &opts, const ArrayConfig &cfg);

        // Score increment for a trial LOS angle, or nullopt when no estimated angle lies within delta
        std::optional<double> increment(LocalAoa trial, double tolerance, const ArrayConfig &cfg) const;
    };

    struct MaxPowerObservation
    {
        CaponBeamformer beamformer;
        ComplexMatrix reference; // first subarray, P x N

        MaxPowerObservation(const Observation &obs, const ArrayConfig &cfg);

        // ||z||^2 with z = (w^H Y1)^T steered at the trial angle
        double increment(LocalAoa trial, const ArrayConfig &cfg) const;
    };

    enum class SinglePathGammaRule
    {
        least_squares, // gamma = a^H ybar / (M cbar)
        printed,       // sum_n |a^H y_n c_n*|^2 / sum_n ||a c_n||^2, kept for comparison studies
    };

    struct SinglePathObservation
    {
        const Observation *obs;
        ComplexVector ybar;
        double cbar = 0.0;
        double energy = 0.0; // sum_n ||y_n||^2
        SinglePathGammaRule rule;

        SinglePathObservation(const Observation &obs, SinglePathGammaRule rule = SinglePathGammaRule::least_squares);

        Complex gamma(LocalAoa trial, const ArrayConfig &cfg) const;

        // r = sum_n ||y_n - gamma a c_n||^2
        double increment(LocalAoa trial, const ArrayConfig &cfg) const;
    };

    // Recursive updates. `history` must hold the measured velocities up to t_k, k = state.step + 1.
    PositionEstimate pseudo_ml_step(GridState &state, const Observation &obs, const MotionHistory &history,
                                    const Position &bs, const PseudoMlOptions &opts, const ArrayConfig &cfg);

    PositionEstimate max_power_step(GridState &state, const Observation &obs, const MotionHistory &history,
                                    const Position &bs, const ArrayConfig &cfg);

    PositionEstimate single_path_step(GridState &state, const Observation &obs, const MotionHistory &history,
                                      const Position &bs, const ArrayConfig &cfg,
                                      SinglePathGammaRule rule = SinglePathGammaRule::least_squares);

    // Batch objectives over observations 1..K, evaluated point by point
    GridState pseudo_ml_batch(std::vector<Position> points, std::span<const Observation> observations,
                              const MotionHistory &history, std::span<const Position> bs_positions,
                              const PseudoMlOptions &opts, const ArrayConfig &cfg);

    GridState max_power_batch(std::vector<Position> points, std::span<const Observation> observations,
                              const MotionHistory &history, std::span<const Position> bs_positions,
                              const ArrayConfig &cfg);

    GridState single_path_batch(std::vector<Position> points, std::span<const Observation> observations,
                                const MotionHistory &history, std::span<const Position> bs_positions,
                                const ArrayConfig &cfg,
                                SinglePathGammaRule rule = SinglePathGammaRule::least_squares);

    // Decision rules shared by the recursive and batch forms
    std::size_t best_pseudo_ml(const GridState &state);
    std::size_t best_max_power(const GridState &state);
    std::size_t best_single_path(const GridState &state);

    PositionEstimate make_estimate(EstimatorKind kind, const GridState &state, std::size_t best,
                                   const MotionHistory &history);
}

#endif
