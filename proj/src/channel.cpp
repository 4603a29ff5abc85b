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

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <cmath>

namespace pmldpe
{
    void ChannelParams::validate() const
    {
        if (!(path_loss_exponent > 0.0))
            throw Error("ChannelParams: path loss exponent must be positive");
        if (!(reference_distance > 0.0))
            throw Error("ChannelParams: reference distance must be positive");
        if (!(rms_delay_spread > 0.0))
            throw Error("ChannelParams: rms delay spread must be positive");
        if (!(doppler_spread > 0.0))
            throw Error("ChannelParams: Doppler spread must be positive");
        if (!(coherence_bandwidth > doppler_spread))
            throw Error("ChannelParams: coherence bandwidth must exceed the Doppler spread");
        if (coherence_time < 0.0)
            throw Error("ChannelParams: coherence time must be non-negative");
        if (!(carrier_frequency > 0.0))
            throw Error("ChannelParams: carrier frequency must be positive");
    }

    double ChannelParams::effective_coherence_time() const
    {
        return coherence_time > 0.0 ? coherence_time : 1.0 / doppler_spread;
    }

    double power_delay_profile(double delay, const ChannelParams &params)
    {
        return std::exp(-delay / params.rms_delay_spread);
    }

    double path_amplitude(double delay, const ChannelParams &params)
    {
        const double p = power_delay_profile(delay, params);
        return params.amplitude_law == AmplitudeLaw::sqrt_pdp ? std::sqrt(p) : p;
    }

    double path_loss_db(double distance, const ChannelParams &params)
    {
        return 10.0 * params.path_loss_exponent * std::log10(distance / params.reference_distance);
    }

    double large_scale_amplitude(double distance, const ChannelParams &params)
    {
        if (!(distance > 0.0))
            throw Error("large_scale_amplitude: distance must be positive");
        const double rx_dbm = params.transmit_power_dbm - path_loss_db(distance, params);
        const double rx_watts = std::pow(10.0, (rx_dbm - 30.0) / 10.0);
        return std::sqrt(rx_watts);
    }

    Complex complex_gaussian(Rng &rng, double variance)
    {
        boost::random::normal_distribution<double> n(0.0, std::sqrt(0.5 * variance));
        const double re = n(rng);
        const double im = n(rng);
        return {re, im};
    }

    Complex qpsk_symbol(int k)
    {
        return std::polar(1.0, 0.25 * pi + 0.5 * pi * (k & 3));
    }

    MultipathRealization sample_multipath(Rng &rng, const ChannelParams &params, int path_count, double distance,
                                          GlobalBearing los_aoa, bool los_blocked)
    {
        if (path_count < 0)
            throw Error("sample_multipath: path count must be non-negative");
        if (!(distance > 0.0))
            throw Error("sample_multipath: distance must be positive");

        boost::random::uniform_real_distribution<double> uniform_angle(0.0, two_pi);
        boost::random::uniform_int_distribution<int> cycles(0, 4);

        MultipathRealization r;
        r.los_aoa = los_aoa;
        r.los_blocked = los_blocked;
        r.paths.reserve(path_count);
        const double fc = params.carrier_frequency;
        for (int m = 0; m < path_count; ++m)
        {
            PathComponent p;
            p.aoa = GlobalBearing(uniform_angle(rng));
            const double phase = uniform_angle(rng);
            const int zeta = cycles(rng);
            p.delay = phase / (two_pi * fc) + zeta / fc;
            p.beta = std::polar(path_amplitude(p.delay, params), phase);
            r.paths.push_back(p);
        }
        r.gamma = std::polar(large_scale_amplitude(distance, params), uniform_angle(rng));
        return r;
    }

    ComplexVector noiseless_response(const MultipathRealization &realization, GlobalBearing heading,
                                     const ArrayConfig &cfg)
    {
        const int m = cfg.element_count();
        ComplexVector x = ComplexVector::Zero(m);
        if (!realization.los_blocked)
            x += steering(global_to_local(realization.los_aoa, heading), m, cfg);
        for (const auto &p : realization.paths)
            x += p.beta * steering(global_to_local(p.aoa, heading), m, cfg);
        return realization.gamma * x;
    }

    Observation generate_observation(Rng &rng, const MultipathRealization &realization, GlobalBearing heading,
                                     const ArrayConfig &cfg, int snapshots, double noise_power)
    {
        if (snapshots < 1)
            throw Error("generate_observation: at least one snapshot is required");
        if (noise_power < 0.0)
            throw Error("generate_observation: noise power must be non-negative");

        const int m = cfg.element_count();
        const ComplexVector x = noiseless_response(realization, heading, cfg);

        boost::random::uniform_int_distribution<int> symbol_index(0, 3);
        Observation obs;
        obs.symbols.resize(snapshots);
        obs.samples.resize(m, snapshots);
        for (int n = 0; n < snapshots; ++n)
        {
            obs.symbols[n] = qpsk_symbol(symbol_index(rng));
            obs.samples.col(n) = x * obs.symbols[n];
            if (noise_power > 0.0)
                for (int k = 0; k < m; ++k)
                    obs.samples(k, n) += complex_gaussian(rng, noise_power);
        }
        return obs;
    }

    double thermal_noise_power(double bandwidth)
    {
        return boltzmann * standard_temperature * bandwidth;
    }

    double snr_at(double distance, const ChannelParams &params, double noise_power)
    {
        if (!(distance > 0.0))
            throw Error("snr_at: distance must be positive");
        const double g = large_scale_amplitude(distance, params);
        return 10.0 * std::log10(g * g / noise_power);
    }
}
