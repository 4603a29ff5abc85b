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

// Acceptance suite: one PASS/FAIL line per criterion, thresholds fixed below.

#include "pmldpe/config.hpp"
#include "pmldpe/estimators.hpp"
#include "pmldpe/harness.hpp"
#include "pmldpe/spectral.hpp"
#include "pmldpe/validation.hpp"
#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>

using namespace pmldpe;

namespace
{
    constexpr double oracle_rel_tol = 1e-4;
    constexpr double stationarity_far_s = 0.122, stationarity_far_tol = 0.15;
    constexpr double stationarity_near_s = 0.006, stationarity_near_tol = 0.25;
    constexpr int music_draws = 100, music_required = 95;
    constexpr double ci_final_window_s = 2.0;
    constexpr double ci_pml_max_rmse_m = 2.0;
    constexpr double ci_single_path_min_ratio = 0.5; // final / early RMSE; below this counts as a real decrease
    constexpr double two_bs_window_s = 2.0;
    constexpr double two_bs_max_rmse_m = 1.5;

    struct Outcome
    {
        bool passed;
        std::string detail;
    };

    std::string fmt(const char *f, double a, double b = 0, double c = 0, double d = 0)
    {
        char buf[256];
        std::snprintf(buf, sizeof buf, f, a, b, c, d);
        return buf;
    }

    std::string preset(const std::string &name)
    {
        return std::string(PMLDPE_PRESET_DIR) + "/" + name + ".ini";
    }

    double brute_force_min(const std::function<double(Complex)> &f, double radius)
    {
        Complex center(0.0, 0.0);
        double best = f(center);
        for (int level = 0; level < 12; ++level)
        {
            const int half = 40;
            const double h = radius / half;
            Complex arg = center;
            for (int i = -half; i <= half; ++i)
                for (int j = -half; j <= half; ++j)
                {
                    const Complex g = center + Complex(i * h, j * h);
                    const double v = f(g);
                    if (v < best)
                    {
                        best = v;
                        arg = g;
                    }
                }
            center = arg;
            radius = 4.0 * h;
        }
        return best;
    }

    Outcome oracle_equivalence()
    {
        Rng rng(2024);
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial)
        {
            const int m = 23, n = 16;
            const ComplexVector x = test::random_matrix(rng, m, 1).col(0);
            const ComplexVector c = test::qpsk_sequence(rng, n);
            const ComplexMatrix y = test::random_matrix(rng, m, 1).col(0) * c.transpose() * 0.5 +
                                    std::polar(1.0, test::uniform(rng, 0, two_pi)) * x * c.transpose() +
                                    test::random_matrix(rng, m, n, 0.2);
            const double score =
                compressed_score(ProjectorEstimate::from_vector(x), y * c.conjugate(), c.squaredNorm());
            const double closed = y.squaredNorm() - score;
            const double brute = brute_force_min(
                [&](Complex g)
                {
                    double r = 0.0;
                    for (int k = 0; k < n; ++k)
                        r += (y.col(k) - g * c[k] * x).squaredNorm();
                    return r;
                },
                4.0);
            worst = std::max(worst, std::abs(closed - brute) / brute);
        }

        bool replay_ok = true;
        std::string replay;
        for (const char *name : {"ci_1bs", "ci_2bs"})
            for (const auto &r : run_scenario_checks(load_scenario(preset(name))))
                if (r.name.find("recursive equals batch") != std::string::npos)
                {
                    replay_ok = replay_ok && r.passed;
                    replay += r.passed ? "" : " " + r.name;
                }
        return {worst <= oracle_rel_tol && replay_ok,
                fmt("max relative gap to brute force %.2e (tol 1e-4); recursive == batch for 3 estimators on 2 "
                    "presets: ",
                    worst) +
                    (replay_ok ? "exact" : "MISMATCH" + replay)};
    }

    Outcome algebraic_invariants()
    {
        const auto results = run_core_checks(7);
        bool ok = true;
        std::string detail;
        for (const auto &r : results)
        {
            const bool relevant = r.name.find("projector") != std::string::npos ||
                                  r.name.find("Capon") != std::string::npos ||
                                  r.name.find("FB covariance") != std::string::npos ||
                                  r.name.find("steering") != std::string::npos ||
                                  r.name.find("power delay") != std::string::npos;
            if (!relevant)
                continue;
            ok = ok && r.passed;
            detail += (detail.empty() ? "" : "; ") + r.name + " " + r.detail;
        }
        return {ok, detail};
    }

    Outcome sampling_and_stationarity()
    {
        ChannelParams ch; // B_D 512 Hz, B_c 250 kHz
        bool n_ok = true;
        for (double alpha : {0.0, 0.5, 1.0})
            n_ok = n_ok && feasibility(ch, alpha, 325e-6).snapshots == 16;
        const double far = stationarity_time(100.0, kmh2ms(50.0), 0.01);
        const double near = stationarity_time(20.0, kmh2ms(50.0), 0.01);
        const bool far_ok = std::abs(far / stationarity_far_s - 1.0) <= stationarity_far_tol;
        const bool near_ok = std::abs(near / stationarity_near_s - 1.0) <= stationarity_near_tol;
        return {n_ok && far_ok && near_ok,
                fmt("N = %.0f for alpha in {0, 0.5, 1}; T_sta(100 m) = %.1f ms (122 +-15%%); T_sta(20 m) = %.2f ms "
                    "(6 +-25%%)",
                    n_ok ? 16.0 : -1.0, far * 1e3, near * 1e3)};
    }

    Outcome music_recovery()
    {
        const ArrayConfig cfg(23, 16, 5.9e9);
        const AngularGrid grid(2048);
        Rng rng(77);
        int hits = 0;
        for (int draw = 0; draw < music_draws; ++draw)
        {
            // Three directions at least 0.25 apart in sine, fully coherent, unit power, 20 dB SNR
            std::vector<double> sines;
            while (sines.size() < 3)
            {
                const double s = test::uniform(rng, -0.85, 0.85);
                bool far = true;
                for (double t : sines)
                    far = far && std::abs(s - t) >= 0.25;
                if (far)
                    sines.push_back(s);
            }
            std::vector<double> angles;
            std::vector<Complex> gains;
            for (double s : sines)
            {
                angles.push_back(std::asin(s));
                gains.push_back(std::polar(1.0, test::uniform(rng, 0, two_pi)));
            }
            Observation obs = test::plane_waves(angles, gains, test::qpsk_sequence(rng, 16), cfg);
            obs.samples += test::random_matrix(rng, 23, 16, 0.01);
            const AoaEstimateSet est = estimate_aoas(obs.samples, obs.symbols, 3, grid, cfg);
            bool ok = true;
            for (double s : sines)
            {
                double gap = 10.0;
                for (const auto &a : est.angles)
                    gap = std::min(gap, std::abs(a.sine() - s));
                ok = ok && gap <= grid.step();
            }
            hits += ok;
        }
        return {hits >= music_required,
                fmt("%.0f/%.0f draws with all three angles within one grid step (need %.0f)", hits, music_draws,
                    music_required)};
    }

    double early_mean(const RmseSeries &s, std::size_t e, double until)
    {
        double sum = 0.0;
        int n = 0;
        for (std::size_t k = 0; k < s.times.size() && s.times[k] <= until + 1e-9; ++k)
        {
            sum += s.rmse[e][k];
            ++n;
        }
        return sum / n;
    }

    Outcome ci_single_bs()
    {
        const ScenarioConfig sc = load_scenario(preset("ci_1bs"));
        const RmseSeries s = run_monte_carlo(sc);
        const double from = s.times.back() - ci_final_window_s;
        const double pml = s.mean_rmse_after(EstimatorKind::pseudo_ml, from);
        const double mp = s.mean_rmse_after(EstimatorKind::max_power, from);
        const double sp = s.mean_rmse_after(EstimatorKind::single_path, from);
        const double sp_ratio = sp / early_mean(s, s.index_of(EstimatorKind::single_path), 1.0);
        const double pml_ratio = pml / early_mean(s, s.index_of(EstimatorKind::pseudo_ml), 1.0);
        const bool a = pml < sp && pml < mp;
        const bool b = pml <= ci_pml_max_rmse_m;
        const bool c = sp_ratio >= ci_single_path_min_ratio;
        return {a && b && c, fmt("%.0f trials; final-2 s RMSE pseudo-ML %.2f m, max-power %.2f m, single-path %.2f m; ",
                                 s.trials, pml, mp, sp) +
                                 "(a) " + (a ? "ok" : "no") + " (b) " + (b ? "ok" : "no") + " (<= 2 m) (c) " +
                                 (c ? "ok" : "no") +
                                 fmt(": single-path final/early %.2f vs pseudo-ML %.2f", sp_ratio, pml_ratio)};
    }

    Outcome ci_two_bs()
    {
        const ScenarioConfig sc = load_scenario(preset("ci_2bs"));
        const RmseSeries s = run_monte_carlo(sc);
        const std::size_t e = s.index_of(EstimatorKind::pseudo_ml);
        double best = 1e300, when = 0.0;
        for (std::size_t k = 0; k < s.times.size() && s.times[k] <= two_bs_window_s + 1e-9; ++k)
            if (s.rmse[e][k] < best)
            {
                best = s.rmse[e][k];
                when = s.times[k];
            }
        double first_hit = -1.0;
        for (std::size_t k = 0; k < s.times.size(); ++k)
            if (s.rmse[e][k] <= two_bs_max_rmse_m)
            {
                first_hit = s.times[k];
                break;
            }
        return {best <= two_bs_max_rmse_m,
                fmt("%.0f trials; pseudo-ML RMSE first <= 1.5 m at t = %.2f s; minimum %.2f m at t = %.2f s within "
                    "the first 2 s",
                    s.trials, first_hit, best, when)};
    }
}

int main()
{
    struct Criterion
    {
        const char *name;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {"oracle equivalence", oracle_equivalence},
        {"algebraic invariants", algebraic_invariants},
        {"sampling feasibility and LOS stationarity", sampling_and_stationarity},
        {"smooth-MUSIC coherent recovery", music_recovery},
        {"CI single-BS RMSE", ci_single_bs},
        {"CI two-BS convergence", ci_two_bs},
    };
    int failed = 0;
    for (const auto &c : criteria)
    {
        const auto start = std::chrono::steady_clock::now();
        Outcome o{false, ""};
        try
        {
            o = c.run();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (o.passed ? "PASS " : "FAIL ") << c.name << ": " << o.detail << " [" << fmt("%.1f", secs)
                  << " s]" << std::endl;
        failed += !o.passed;
    }
    return failed == 0 ? 0 : 1;
}
