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

#include "pmldpe/validation.hpp"

#include <boost/random/uniform_real_distribution.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace pmldpe
{
    namespace
    {
        std::string num(double v)
        {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.3g", v);
            return buf;
        }

        CheckResult check(std::string name, bool ok, std::string detail)
        {
            return {std::move(name), ok, std::move(detail)};
        }

        ComplexMatrix random_samples(Rng &rng, int rows, int cols)
        {
            ComplexMatrix y(rows, cols);
            for (int c = 0; c < cols; ++c)
                for (int r = 0; r < rows; ++r)
                    y(r, c) = complex_gaussian(rng, 1.0);
            return y;
        }

        CheckResult steering_checks(Rng &rng)
        {
            const ArrayConfig cfg(23, 16, 5.9e9);
            boost::random::uniform_real_distribution<double> angle(-pi / 2, pi / 2);
            double worst = 0.0;
            for (int i = 0; i < 200; ++i)
            {
                const double th = angle(rng);
                const ComplexVector a = steering(LocalAoa(th), cfg.element_count(), cfg);
                const ComplexVector b = steering(LocalAoa(-th), cfg.element_count(), cfg);
                for (int m = 0; m < a.size(); ++m)
                {
                    worst = std::max(worst, std::abs(std::abs(a[m]) - 1.0));
                    worst = std::max(worst, std::abs(b[m] - std::conj(a[m])));
                }
            }
            return check("steering unit modulus and reflection", worst < 1e-12, "max deviation " + num(worst));
        }

        CheckResult frame_checks(Rng &rng)
        {
            boost::random::uniform_real_distribution<double> angle(0.0, two_pi);
            double worst = 0.0;
            for (int i = 0; i < 1000; ++i)
            {
                const double b = angle(rng);
                const double h = angle(rng);
                const LocalAoa local = global_to_local(GlobalBearing(b), GlobalBearing(h));
                worst = std::max(worst, std::abs(std::sin(local.radians()) - std::sin(b - h)));
            }
            return check("global to local frame sine identity", worst < 1e-12, "max deviation " + num(worst));
        }

        CheckResult covariance_checks(Rng &rng)
        {
            const ComplexMatrix y = random_samples(rng, 23, 16);
            const SmoothedCovariance fo = forward_covariance(y, 16);
            const SmoothedCovariance fb = fb_covariance(fo);
            const double herm = (fb.matrix - fb.matrix.adjoint()).norm();
            const double pers = (exchange_conjugate(fb.matrix) - fb.matrix).norm();
            const double scale = fb.matrix.norm();
            const bool ok = herm <= 1e-12 * scale && pers <= 1e-12 * scale;
            return check("FB covariance Hermitian and persymmetric", ok,
                         "residuals " + num(herm / scale) + ", " + num(pers / scale));
        }

        CheckResult capon_checks(Rng &rng)
        {
            const ArrayConfig cfg(23, 16, 5.9e9);
            const SmoothedCovariance fb = fb_covariance(forward_covariance(random_samples(rng, 23, 16), 16));
            const CaponBeamformer bf(fb);
            double worst = 0.0;
            boost::random::uniform_real_distribution<double> angle(-1.4, 1.4);
            for (int i = 0; i < 50; ++i)
            {
                const LocalAoa look(angle(rng));
                const ComplexVector w = bf.weights(look, cfg);
                const ComplexVector a = steering(look, cfg.subarray_length(), cfg);
                worst = std::max(worst, std::abs(w.dot(a) - 1.0));
            }
            return check("Capon distortionless response", worst < 1e-9, "max |w^H a - 1| " + num(worst));
        }

        CheckResult projector_checks(Rng &rng)
        {
            const ComplexVector x = random_samples(rng, 23, 1).col(0);
            const ProjectorEstimate p = ProjectorEstimate::from_vector(x);
            const double idem = (p.matrix * p.matrix - p.matrix).norm();
            const double herm = (p.matrix - p.matrix.adjoint()).norm();
            const double trace = std::abs(p.matrix.trace() - 1.0);
            const bool ok = idem < 1e-12 && herm < 1e-12 && trace < 1e-12;
            return check("rank-one projector idempotent, Hermitian, unit trace", ok,
                         "residuals " + num(idem) + ", " + num(herm) + ", " + num(trace));
        }

        // Residual after the closed-form complex gain must equal energy minus the compressed score
        CheckResult profile_checks(Rng &rng)
        {
            const int m = 23;
            const int n = 16;
            const ComplexVector x = random_samples(rng, m, 1).col(0);
            const ComplexMatrix y = random_samples(rng, m, n);
            ComplexVector c(n);
            for (int i = 0; i < n; ++i)
                c[i] = qpsk_symbol(i % 4);
            const ComplexVector ybar = y * c.conjugate();
            const double cbar = c.squaredNorm();
            const double score = compressed_score(ProjectorEstimate::from_vector(x), ybar, cbar);
            const Complex gamma = x.dot(ybar) / (x.squaredNorm() * cbar);
            double residual = 0.0;
            for (int i = 0; i < n; ++i)
                residual += (y.col(i) - gamma * c[i] * x).squaredNorm();
            const double gap = std::abs(residual - (y.squaredNorm() - score)) / y.squaredNorm();
            return check("compressed score equals profiled LS fit gain", gap < 1e-12, "relative gap " + num(gap));
        }

        CheckResult pdp_checks()
        {
            const ChannelParams p;
            const double at0 = power_delay_profile(0.0, p);
            const double at_sigma = power_delay_profile(p.rms_delay_spread, p);
            const bool ok = std::abs(at0 - 1.0) < 1e-15 && std::abs(at_sigma - std::exp(-1.0)) < 1e-15;
            return check("power delay profile values", ok, "P(0) " + num(at0) + ", P(sigma) " + num(at_sigma));
        }

        CheckResult feasibility_checks()
        {
            ChannelParams p;
            p.coherence_time = 325e-6;
            const FeasibilityReport r = feasibility(p, 0.5, 325e-6);
            return check("sampling feasibility snapshot count", r.snapshots == 16,
                         "N = " + std::to_string(r.snapshots));
        }

        CheckResult stationarity_checks()
        {
            const double far = stationarity_time(100.0, kmh2ms(50.0), 0.01);
            const double near = stationarity_time(20.0, kmh2ms(50.0), 0.01);
            const bool ok = std::abs(far / 0.122 - 1.0) <= 0.15 && std::abs(near / 0.006 - 1.0) <= 0.25;
            return check("stationarity time at 100 m and 20 m", ok,
                         num(far * 1e3) + " ms, " + num(near * 1e3) + " ms");
        }

        bool same_state(const GridState &a, const GridState &b)
        {
            return a.scores == b.scores && a.non_associations == b.non_associations;
        }
    }

    std::vector<CheckResult> run_core_checks(std::uint64_t seed)
    {
        Rng rng(seed);
        std::vector<CheckResult> out;
        out.push_back(steering_checks(rng));
        out.push_back(frame_checks(rng));
        out.push_back(covariance_checks(rng));
        out.push_back(capon_checks(rng));
        out.push_back(projector_checks(rng));
        out.push_back(profile_checks(rng));
        out.push_back(pdp_checks());
        out.push_back(feasibility_checks());
        out.push_back(stationarity_checks());
        return out;
    }

    ScenarioConfig reduced_scenario(const ScenarioConfig &scenario, double duration, double spacing)
    {
        ScenarioConfig s = scenario;
        s.duration = std::min(s.duration, duration);
        s.trials = std::min(s.trials, 2);
        s.grid.spacing = std::max(s.grid.spacing, spacing);
        return s;
    }

    std::vector<CheckResult> run_scenario_checks(const ScenarioConfig &scenario)
    {
        std::vector<CheckResult> out;
        const std::string tag = "[" + scenario.name + "] ";
        try
        {
            scenario.validate();
            out.push_back(check(tag + "configuration valid", true, "ok"));
        }
        catch (const std::exception &e)
        {
            out.push_back(check(tag + "configuration valid", false, e.what()));
            return out;
        }

        try
        {
            const ScenarioConfig s = reduced_scenario(scenario);
            const ArrayConfig cfg = s.array();
            const std::uint64_t seed = trial_seed(s.master_seed, static_cast<std::uint64_t>(s.first_trial));
            const TrialData data = simulate_trial_data(s, seed);
            const MotionHistory full = measured_history(s, data.truth);

            PseudoMlOptions pml;
            pml.association_tolerance = s.association_tolerance;
            pml.d_max = s.d_max;
            pml.grid = AngularGrid(s.spectrum_points);

            const std::vector<Position> grid = make_grid(s.grid);
            GridState rec_pml(grid), rec_mp(grid), rec_sp(grid);
            MotionHistory history(GlobalBearing(s.mobility.initial_heading));
            history.push(data.truth.times[0], data.truth.measured_velocities[0]);
            for (std::size_t k = 1; k <= data.truth.steps(); ++k)
            {
                const Observation &obs = data.observations[k - 1];
                const Position &bs = s.bs_positions[static_cast<std::size_t>(obs.bs_id)];
                history.push(data.truth.times[k], data.truth.measured_velocities[k]);
                pseudo_ml_step(rec_pml, obs, history, bs, pml, cfg);
                max_power_step(rec_mp, obs, history, bs, cfg);
                single_path_step(rec_sp, obs, history, bs, cfg);
            }
            const std::span<const Observation> obs(data.observations);
            const std::span<const Position> bss(s.bs_positions);
            out.push_back(check(tag + "pseudo-ML recursive equals batch",
                                same_state(rec_pml, pseudo_ml_batch(grid, obs, full, bss, pml, cfg)),
                                std::to_string(grid.size()) + " points, " + std::to_string(obs.size()) + " steps"));
            out.push_back(check(tag + "max-power recursive equals batch",
                                same_state(rec_mp, max_power_batch(grid, obs, full, bss, cfg)), "exact"));
            out.push_back(check(tag + "single-path recursive equals batch",
                                same_state(rec_sp, single_path_batch(grid, obs, full, bss, cfg)), "exact"));

            ScenarioConfig one = s;
            one.trials = 1;
            one.estimators = {EstimatorKind::pseudo_ml};
            const TrialResult a = run_trial(one, seed);
            const TrialResult b = run_trial(one, seed);
            bool same = a.steps.size() == b.steps.size();
            for (std::size_t k = 0; same && k < a.steps.size(); ++k)
                same = a.steps[k].estimates[0].error == b.steps[k].estimates[0].error;
            out.push_back(check(tag + "trial reproducible from its seed", same, "seed " + std::to_string(seed)));
        }
        catch (const std::exception &e)
        {
            out.push_back(check(tag + "scenario run", false, e.what()));
        }
        return out;
    }

    bool report(std::ostream &os, const std::vector<CheckResult> &results)
    {
        bool all = true;
        for (const auto &r : results)
        {
            os << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
            all = all && r.passed;
        }
        return all;
    }
}
