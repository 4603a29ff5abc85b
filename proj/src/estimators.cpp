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

#include "pmldpe/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pmldpe
{
    std::string to_string(EstimatorKind kind)
    {
        switch (kind)
        {
        case EstimatorKind::pseudo_ml:
            return "pseudo_ml";
        case EstimatorKind::max_power:
            return "max_power";
        case EstimatorKind::single_path:
            return "single_path";
        }
        return "unknown";
    }

    EstimatorKind estimator_from_string(const std::string &name)
    {
        if (name == "pseudo_ml")
            return EstimatorKind::pseudo_ml;
        if (name == "max_power")
            return EstimatorKind::max_power;
        if (name == "single_path")
            return EstimatorKind::single_path;
        throw Error("unknown estimator '" + name + "'");
    }

    std::vector<Position> make_grid(const GridSpec &spec)
    {
        if (!(spec.spacing > 0.0))
            throw Error("make_grid: spacing must be positive");
        if (spec.half_width_x < 0.0 || spec.half_width_y < 0.0)
            throw Error("make_grid: half widths must be non-negative");
        // small slack so that exact multiples of the spacing are included
        const int nx = static_cast<int>(std::floor(spec.half_width_x / spec.spacing + 1e-9));
        const int ny = static_cast<int>(std::floor(spec.half_width_y / spec.spacing + 1e-9));
        std::vector<Position> out;
        out.reserve(static_cast<std::size_t>(2 * nx + 1) * (2 * ny + 1));
        for (int iy = -ny; iy <= ny; ++iy)
            for (int ix = -nx; ix <= nx; ++ix)
                out.push_back({spec.center.x + ix * spec.spacing, spec.center.y + iy * spec.spacing});
        return out;
    }

    GridState::GridState(std::vector<Position> grid_points)
        : points(std::move(grid_points)), scores(points.size(), 0.0), non_associations(points.size(), 0)
    {
        if (points.empty())
            throw Error("GridState: the grid is empty");
    }

    std::vector<std::size_t> GridState::candidates() const
    {
        const int least = *std::min_element(non_associations.begin(), non_associations.end());
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < points.size(); ++i)
            if (non_associations[i] == least)
                out.push_back(i);
        return out;
    }

    void MotionHistory::push(double time, const Velocity &measured)
    {
        if (!std::isfinite(time) || (!samples_.empty() && !(time > samples_.back().time)))
            throw Error("MotionHistory: sample times must increase strictly");
        samples_.push_back({time, measured});
    }

    std::vector<VelocitySegment> MotionHistory::segments(std::size_t k) const
    {
        if (k >= samples_.size())
            throw Error("MotionHistory: step " + std::to_string(k) + " has no velocity sample");
        std::vector<VelocitySegment> out;
        out.reserve(k);
        for (std::size_t i = 1; i <= k; ++i)
            out.push_back({samples_[i - 1].velocity, samples_[i].time - samples_[i - 1].time});
        return out;
    }

    Position MotionHistory::displacement(std::size_t k) const
    {
        if (k >= samples_.size())
            throw Error("MotionHistory: step " + std::to_string(k) + " has no velocity sample");
        double sx = 0.0, sy = 0.0;
        for (std::size_t i = 1; i <= k; ++i)
        {
            const double dt = samples_[i].time - samples_[i - 1].time;
            sx += samples_[i - 1].velocity.vx * dt;
            sy += samples_[i - 1].velocity.vy * dt;
        }
        return {sx, sy};
    }

    GlobalBearing MotionHistory::heading(std::size_t k) const
    {
        if (k >= samples_.size())
            throw Error("MotionHistory: step " + std::to_string(k) + " has no velocity sample");
        HeadingTracker tracker(initial_heading_);
        for (std::size_t i = 0; i <= k; ++i)
            tracker.update(samples_[i].velocity);
        return tracker.current();
    }

    ProjectorEstimate ProjectorEstimate::from_vector(const ComplexVector &x)
    {
        const double norm2 = x.squaredNorm();
        if (!(norm2 > 0.0))
            throw Error("ProjectorEstimate: cannot project onto a zero vector");
        return {x * x.adjoint() / norm2};
    }

    double compressed_score(const ProjectorEstimate &projector, const ComplexVector &ybar, double cbar)
    {
        if (!(cbar > 0.0))
            throw Error("compressed_score: symbol energy must be positive");
        return (projector.matrix * ybar).squaredNorm() / cbar;
    }

    ComplexVector matched_sum(const Observation &obs)
    {
        if (obs.samples.cols() != obs.symbols.size())
            throw Error("observation has " + std::to_string(obs.samples.cols()) + " snapshots but " +
                        std::to_string(obs.symbols.size()) + " symbols");
        return obs.samples * obs.symbols.conjugate();
    }

    LocalAoa trial_angle(const Position &p0, const Position &displacement, const Position &bs,
                         GlobalBearing heading)
    {
        const Position ms = p0 + displacement;
        // A hypothesis sitting exactly on the BS has no bearing; look along the heading instead.
        if (ms == bs)
            return LocalAoa(0.0);
        return global_to_local(los_bearing(bs, ms), heading);
    }

    int effective_model_order(int d_max, const ArrayConfig &cfg)
    {
        if (d_max < 0)
            throw Error("D_max must be non-negative");
        return std::max(1, std::min(d_max + 1, cfg.subarray_length() - 1));
    }

    namespace
    {
        void check_observation(const Observation &obs, const ArrayConfig &cfg)
        {
            if (obs.samples.rows() != cfg.element_count())
                throw Error("observation has " + std::to_string(obs.samples.rows()) + " rows, array has " +
                            std::to_string(cfg.element_count()) + " elements");
            if (obs.samples.cols() < 1 || obs.samples.cols() != obs.symbols.size())
                throw Error("observation snapshot and symbol counts are inconsistent");
        }
    }

    PseudoMlObservation::PseudoMlObservation(const Observation &obs, const PseudoMlOptions &opts,
                                             const ArrayConfig &cfg)
    {
        check_observation(obs, cfg);
        if (cfg.subarray_length() < 2)
            throw Error("pseudo-ML estimation needs a subarray length of at least 2");
        aoas = estimate_aoas(obs.samples, obs.symbols, effective_model_order(opts.d_max, cfg), opts.grid, cfg);
        ybar = matched_sum(obs);
        cbar = obs.symbols.squaredNorm();

        const int m = cfg.element_count();
        const std::size_t count = aoas.angles.size();
        std::vector<ComplexVector> terms;
        terms.reserve(count);
        for (std::size_t s = 0; s < count; ++s)
            terms.push_back(aoas.amplitudes[static_cast<Eigen::Index>(s)] * steering(aoas.angles[s], m, cfg));
        complement.assign(count, ComplexVector::Zero(m));
        for (std::size_t s = 0; s < count; ++s)
            for (std::size_t j = 0; j < count; ++j)
                if (j != s)
                    complement[s] += terms[j];
    }

    std::optional<double> PseudoMlObservation::increment(LocalAoa trial, double tolerance,
                                                         const ArrayConfig &cfg) const
    {
        // closest estimated direction; ties go to the stronger (earlier) peak
        std::size_t best = aoas.angles.size();
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < aoas.angles.size(); ++s)
        {
            const double d = std::abs(trial.radians() - aoas.angles[s].radians());
            if (d < best_dist)
            {
                best_dist = d;
                best = s;
            }
        }
        if (best == aoas.angles.size() || best_dist > tolerance)
            return std::nullopt;

        const ComplexVector x = complement[best] +
                                aoas.amplitudes[static_cast<Eigen::Index>(best)] *
                                    steering(trial, cfg.element_count(), cfg);
        const double norm2 = x.squaredNorm();
        if (!(norm2 > 0.0))
            return std::nullopt;
        // ||P ybar||^2 / cbar with P = x x^H / ||x||^2
        return std::norm(x.dot(ybar)) / (norm2 * cbar);
    }

    namespace
    {
        SmoothedCovariance checked_fb(const Observation &obs, const ArrayConfig &cfg)
        {
            check_observation(obs, cfg);
            return fb_covariance(forward_covariance(obs.samples, cfg.subarray_length()));
        }
    }

    MaxPowerObservation::MaxPowerObservation(const Observation &obs, const ArrayConfig &cfg)
        : beamformer(checked_fb(obs, cfg)), reference(obs.samples.topRows(cfg.subarray_length()))
    {
    }

    double MaxPowerObservation::increment(LocalAoa trial, const ArrayConfig &cfg) const
    {
        const ComplexVector w = beamformer.weights(trial, cfg);
        return (reference.adjoint() * w).squaredNorm();
    }

    SinglePathObservation::SinglePathObservation(const Observation &o, SinglePathGammaRule r)
        : obs(&o), ybar(matched_sum(o)), cbar(o.symbols.squaredNorm()), energy(o.samples.squaredNorm()), rule(r)
    {
        if (!(cbar > 0.0))
            throw Error("single-path estimation needs symbols with non-zero energy");
    }

    Complex SinglePathObservation::gamma(LocalAoa trial, const ArrayConfig &cfg) const
    {
        const int m = static_cast<int>(obs->samples.rows());
        const ComplexVector a = steering(trial, m, cfg);
        if (rule == SinglePathGammaRule::least_squares)
            return a.dot(ybar) / (m * cbar);
        double num = 0.0;
        for (int n = 0; n < obs->samples.cols(); ++n)
            num += std::norm(a.dot(obs->samples.col(n)) * std::conj(obs->symbols[n]));
        return num / (m * cbar);
    }

    double SinglePathObservation::increment(LocalAoa trial, const ArrayConfig &cfg) const
    {
        const int m = static_cast<int>(obs->samples.rows());
        if (rule == SinglePathGammaRule::least_squares)
        {
            // sum_n ||y_n - g a c_n||^2 at the LS minimiser, using ||a||^2 = M
            const Complex proj = steering(trial, m, cfg).dot(ybar);
            return std::max(0.0, energy - std::norm(proj) / (m * cbar));
        }
        const ComplexVector a = steering(trial, m, cfg);
        const Complex g = gamma(trial, cfg);
        double r = 0.0;
        for (int n = 0; n < obs->samples.cols(); ++n)
            r += (obs->samples.col(n) - g * obs->symbols[n] * a).squaredNorm();
        return r;
    }

    namespace
    {
        struct StepGeometry
        {
            Position displacement;
            GlobalBearing heading;
        };

        StepGeometry step_geometry(const MotionHistory &history, std::size_t k)
        {
            return {history.displacement(k), history.heading(k)};
        }

        std::size_t next_step(const GridState &state, const MotionHistory &history)
        {
            const auto k = static_cast<std::size_t>(state.step) + 1;
            if (history.size() <= k)
                throw Error("step " + std::to_string(k) + " needs a measured velocity at t_k");
            return k;
        }

        const Position &bs_of(const Observation &obs, std::span<const Position> bs_positions)
        {
            if (obs.bs_id < 0 || static_cast<std::size_t>(obs.bs_id) >= bs_positions.size())
                throw Error("observation refers to unknown BS " + std::to_string(obs.bs_id));
            return bs_positions[static_cast<std::size_t>(obs.bs_id)];
        }

        std::size_t argmax_over(const std::vector<double> &v, const std::vector<std::size_t> &idx)
        {
            std::size_t best = idx.front();
            for (std::size_t i : idx)
                if (v[i] > v[best])
                    best = i;
            return best;
        }
    }

    std::size_t best_pseudo_ml(const GridState &state)
    {
        return argmax_over(state.scores, state.candidates());
    }

    std::size_t best_max_power(const GridState &state)
    {
        return static_cast<std::size_t>(std::max_element(state.scores.begin(), state.scores.end()) -
                                        state.scores.begin());
    }

    std::size_t best_single_path(const GridState &state)
    {
        return static_cast<std::size_t>(std::min_element(state.scores.begin(), state.scores.end()) -
                                        state.scores.begin());
    }

    PositionEstimate make_estimate(EstimatorKind kind, const GridState &state, std::size_t best,
                                   const MotionHistory &history)
    {
        PositionEstimate e;
        e.estimator = kind;
        e.step = state.step;
        const auto k = static_cast<std::size_t>(state.step);
        e.time = k < history.size() ? history[k].time : 0.0;
        e.initial = state.points[best];
        const auto segs = history.segments(k);
        e.current = segs.empty() ? e.initial : reconstruct_trajectory(e.initial, segs).back();
        e.candidate_count = kind == EstimatorKind::pseudo_ml ? state.candidates().size() : state.size();
        return e;
    }

    PositionEstimate pseudo_ml_step(GridState &state, const Observation &obs, const MotionHistory &history,
                                    const Position &bs, const PseudoMlOptions &opts, const ArrayConfig &cfg)
    {
        const std::size_t k = next_step(state, history);
        const PseudoMlObservation data(obs, opts, cfg);
        const StepGeometry geo = step_geometry(history, k);
        for (std::size_t p = 0; p < state.size(); ++p)
        {
            const LocalAoa trial = trial_angle(state.points[p], geo.displacement, bs, geo.heading);
            if (const auto inc = data.increment(trial, opts.association_tolerance, cfg))
                state.scores[p] += *inc;
            else
                ++state.non_associations[p];
        }
        state.step = static_cast<int>(k);
        return make_estimate(EstimatorKind::pseudo_ml, state, best_pseudo_ml(state), history);
    }

    PositionEstimate max_power_step(GridState &state, const Observation &obs, const MotionHistory &history,
                                    const Position &bs, const ArrayConfig &cfg)
    {
        const std::size_t k = next_step(state, history);
        const MaxPowerObservation data(obs, cfg);
        const StepGeometry geo = step_geometry(history, k);
        for (std::size_t p = 0; p < state.size(); ++p)
            state.scores[p] += data.increment(trial_angle(state.points[p], geo.displacement, bs, geo.heading), cfg);
        state.step = static_cast<int>(k);
        return make_estimate(EstimatorKind::max_power, state, best_max_power(state), history);
    }

    PositionEstimate single_path_step(GridState &state, const Observation &obs, const MotionHistory &history,
                                      const Position &bs, const ArrayConfig &cfg, SinglePathGammaRule rule)
    {
        const std::size_t k = next_step(state, history);
        check_observation(obs, cfg);
        const SinglePathObservation data(obs, rule);
        const StepGeometry geo = step_geometry(history, k);
        for (std::size_t p = 0; p < state.size(); ++p)
            state.scores[p] += data.increment(trial_angle(state.points[p], geo.displacement, bs, geo.heading), cfg);
        state.step = static_cast<int>(k);
        return make_estimate(EstimatorKind::single_path, state, best_single_path(state), history);
    }

    namespace
    {
        std::vector<StepGeometry> batch_geometry(const MotionHistory &history, std::size_t count)
        {
            if (history.size() <= count)
                throw Error("batch evaluation needs measured velocities up to the last observation");
            std::vector<StepGeometry> out;
            out.reserve(count);
            for (std::size_t k = 1; k <= count; ++k)
                out.push_back(step_geometry(history, k));
            return out;
        }
    }

    GridState pseudo_ml_batch(std::vector<Position> points, std::span<const Observation> observations,
                              const MotionHistory &history, std::span<const Position> bs_positions,
                              const PseudoMlOptions &opts, const ArrayConfig &cfg)
    {
        GridState state(std::move(points));
        const auto geo = batch_geometry(history, observations.size());
        std::vector<PseudoMlObservation> data;
        data.reserve(observations.size());
        for (const auto &obs : observations)
            data.emplace_back(obs, opts, cfg);

        for (std::size_t p = 0; p < state.size(); ++p)
            for (std::size_t i = 0; i < observations.size(); ++i)
            {
                const Position &bs = bs_of(observations[i], bs_positions);
                const LocalAoa trial = trial_angle(state.points[p], geo[i].displacement, bs, geo[i].heading);
                if (const auto inc = data[i].increment(trial, opts.association_tolerance, cfg))
                    state.scores[p] += *inc;
                else
                    ++state.non_associations[p];
            }
        state.step = static_cast<int>(observations.size());
        return state;
    }

    GridState max_power_batch(std::vector<Position> points, std::span<const Observation> observations,
                              const MotionHistory &history, std::span<const Position> bs_positions,
                              const ArrayConfig &cfg)
    {
        GridState state(std::move(points));
        const auto geo = batch_geometry(history, observations.size());
        std::vector<MaxPowerObservation> data;
        data.reserve(observations.size());
        for (const auto &obs : observations)
            data.emplace_back(obs, cfg);

        for (std::size_t p = 0; p < state.size(); ++p)
            for (std::size_t i = 0; i < observations.size(); ++i)
            {
                const Position &bs = bs_of(observations[i], bs_positions);
                state.scores[p] +=
                    data[i].increment(trial_angle(state.points[p], geo[i].displacement, bs, geo[i].heading), cfg);
            }
        state.step = static_cast<int>(observations.size());
        return state;
    }

    GridState single_path_batch(std::vector<Position> points, std::span<const Observation> observations,
                                const MotionHistory &history, std::span<const Position> bs_positions,
                                const ArrayConfig &cfg, SinglePathGammaRule rule)
    {
        GridState state(std::move(points));
        const auto geo = batch_geometry(history, observations.size());
        std::vector<SinglePathObservation> data;
        data.reserve(observations.size());
        for (const auto &obs : observations)
        {
            check_observation(obs, cfg);
            data.emplace_back(obs, rule);
        }

        for (std::size_t p = 0; p < state.size(); ++p)
            for (std::size_t i = 0; i < observations.size(); ++i)
            {
                const Position &bs = bs_of(observations[i], bs_positions);
                state.scores[p] +=
                    data[i].increment(trial_angle(state.points[p], geo[i].displacement, bs, geo[i].heading), cfg);
            }
        state.step = static_cast<int>(observations.size());
        return state;
    }
}
