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

#include "pmldpe/channel.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace pmldpe;

TEST_CASE("power delay profile")
{
    const ChannelParams p;
    CHECK(power_delay_profile(0.0, p) == doctest::Approx(1.0));
    CHECK(path_amplitude(0.0, p) == doctest::Approx(1.0));
    CHECK(power_delay_profile(p.rms_delay_spread, p) == doctest::Approx(0.36787944117144233));
    CHECK(path_amplitude(p.rms_delay_spread, p) == doctest::Approx(0.6065306597126334));

    ChannelParams plain = p;
    plain.amplitude_law = AmplitudeLaw::pdp;
    CHECK(path_amplitude(p.rms_delay_spread, plain) == doctest::Approx(std::exp(-1.0)));

    double previous = 2.0;
    for (int i = 0; i < 100; ++i)
    {
        const double a = path_amplitude(i * 1e-8, p);
        CHECK(a < previous);
        previous = a;
    }
}

TEST_CASE("path loss and large-scale amplitude")
{
    const ChannelParams p;
    CHECK(path_loss_db(1.0, p) == doctest::Approx(0.0));
    // 18 dBm = 10^(-1.2) W
    CHECK(large_scale_amplitude(1.0, p) == doctest::Approx(std::sqrt(std::pow(10.0, -1.2))));
    CHECK(path_loss_db(2.0, p) - path_loss_db(1.0, p) == doctest::Approx(12.0412).epsilon(1e-5));
    CHECK_THROWS_AS(large_scale_amplitude(0.0, p), Error);
}

TEST_CASE("snr_at")
{
    const ChannelParams p;
    const double floor_w = std::pow(10.0, (p.transmit_power_dbm - 30.0) / 10.0);
    CHECK(snr_at(1.0, p, floor_w) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(snr_at(20.0, p, 1e-12) - snr_at(10.0, p, 1e-12) == doctest::Approx(-12.0412).epsilon(1e-5));

    // Regression baseline: 60 m link with thermal noise over the 37.5 kHz chosen bandwidth
    const double noise = thermal_noise_power(37500.0);
    const double oracle = (p.transmit_power_dbm - 30.0) - 40.0 * std::log10(60.0) -
                          10.0 * std::log10(1.380649e-23 * 290.0 * 37500.0);
    CHECK(snr_at(60.0, p, noise) == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(snr_at(60.0, p, noise) == doctest::Approx(75.07).epsilon(1e-3));
}

TEST_CASE("sample_multipath invariants")
{
    const ChannelParams p;
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial)
    {
        const int d = trial % 20;
        const auto r = sample_multipath(rng, p, d, 60.0, GlobalBearing(0.4), trial % 2 == 0);
        REQUIRE(r.path_count() == d);
        CHECK(std::abs(std::abs(r.gamma) - large_scale_amplitude(60.0, p)) < 1e-15);
        for (const auto &c : r.paths)
        {
            CHECK(std::abs(c.beta) <= 1.0);
            CHECK(c.delay >= 0.0);
        }
    }
    CHECK_THROWS_AS(sample_multipath(rng, p, 3, 0.0, GlobalBearing(0.0), false), Error);
    CHECK_THROWS_AS(sample_multipath(rng, p, -1, 10.0, GlobalBearing(0.0), false), Error);
}

TEST_CASE("noiseless observations")
{
    const ArrayConfig cfg(8, 4, 5.9e9);
    const ChannelParams p;
    Rng rng(9);
    const auto los = sample_multipath(rng, p, 0, 30.0, GlobalBearing(1.0), false);
    const Observation obs = generate_observation(rng, los, GlobalBearing(0.2), cfg, 16, 0.0);
    REQUIRE(obs.samples.rows() == 8);
    REQUIRE(obs.snapshots() == 16);
    const ComplexVector a = steering(LocalAoa(0.8), 8, cfg);
    for (int n = 0; n < 16; ++n)
    {
        CHECK(std::abs(std::abs(obs.symbols[n]) - 1.0) < 1e-15);
        CHECK((obs.samples.col(n) - los.gamma * a * obs.symbols[n]).norm() < 1e-12 * std::abs(los.gamma));
    }

    const auto blocked = sample_multipath(rng, p, 0, 30.0, GlobalBearing(1.0), true);
    CHECK(generate_observation(rng, blocked, GlobalBearing(0.2), cfg, 16, 0.0).samples.norm() == 0.0);
    CHECK_THROWS_AS(generate_observation(rng, los, GlobalBearing(0.2), cfg, 0, 0.0), Error);
    CHECK_THROWS_AS(generate_observation(rng, los, GlobalBearing(0.2), cfg, 4, -1.0), Error);
}

TEST_CASE("blocked links never read the LOS angle")
{
    const ArrayConfig cfg(8, 4, 5.9e9);
    const ChannelParams p;
    Rng r1(21), r2(21);
    const auto a = sample_multipath(r1, p, 6, 40.0, GlobalBearing(0.1), true);
    const auto b = sample_multipath(r2, p, 6, 40.0, GlobalBearing(2.9), true);
    const auto ya = generate_observation(r1, a, GlobalBearing(0.0), cfg, 16, 1e-3);
    const auto yb = generate_observation(r2, b, GlobalBearing(0.0), cfg, 16, 1e-3);
    CHECK(ya.samples == yb.samples);
}

TEST_CASE("sample covariance converges to the model")
{
    const int m = 4;
    const int n = 100000;
    const double sigma2 = 0.5;
    const ArrayConfig cfg(m, m, 5.9e9);
    MultipathRealization r;
    r.los_aoa = GlobalBearing(0.7);
    r.gamma = Complex(1.0, 0.0);
    Rng rng(17);
    const Observation obs = generate_observation(rng, r, GlobalBearing(0.0), cfg, n, sigma2);
    const ComplexMatrix sample = obs.samples * obs.samples.adjoint() / double(n);
    const ComplexVector a = steering(LocalAoa(0.7), m, cfg);
    const ComplexMatrix model = a * a.adjoint() + sigma2 * ComplexMatrix::Identity(m, m);
    CHECK((sample - model).norm() / model.norm() < 0.01);

    // Energy accounting per snapshot: ||gamma x||^2 + M sigma^2
    const double energy = obs.samples.squaredNorm() / n;
    CHECK(energy == doctest::Approx(m + m * sigma2).epsilon(0.02));
}

TEST_CASE("noise is white across antennas and snapshots")
{
    const int m = 3;
    const int n = 100000;
    const ArrayConfig cfg(m, m, 5.9e9);
    MultipathRealization r;
    r.los_blocked = true;
    Rng rng(23);
    const Observation obs = generate_observation(rng, r, GlobalBearing(0.0), cfg, n, 1.0);
    const ComplexMatrix c = obs.samples * obs.samples.adjoint() / double(n);
    const double se = 1.0 / std::sqrt(double(n));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
        {
            const double target = i == j ? 1.0 : 0.0;
            CHECK(std::abs(c(i, j) - target) < 3.0 * se * (i == j ? 1.0 : 1.0));
        }
    // Lag-one correlation across snapshots
    Complex lag(0.0, 0.0);
    for (int k = 1; k < n; ++k)
        lag += obs.samples(0, k) * std::conj(obs.samples(0, k - 1));
    CHECK(std::abs(lag) / (n - 1) < 3.0 * se);
}

TEST_CASE("qpsk symbols and thermal noise")
{
    for (int k = 0; k < 8; ++k)
    {
        CHECK(std::abs(qpsk_symbol(k)) == doctest::Approx(1.0));
        CHECK(std::arg(qpsk_symbol(k)) == doctest::Approx(std::arg(std::polar(1.0, pi / 4 + k * pi / 2))));
    }
    CHECK(thermal_noise_power(1.0) == doctest::Approx(1.380649e-23 * 290.0));
}

TEST_CASE("channel parameter validation")
{
    ChannelParams p;
    CHECK_NOTHROW(p.validate());
    CHECK(p.effective_coherence_time() == doctest::Approx(1.0 / 512.0));
    p.coherence_time = 325e-6;
    CHECK(p.effective_coherence_time() == doctest::Approx(325e-6));
    p.coherence_bandwidth = 100.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = ChannelParams{};
    p.path_loss_exponent = 0.0;
    CHECK_THROWS_AS(p.validate(), Error);
}
