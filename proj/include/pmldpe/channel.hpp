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

#ifndef PMLDPE_CHANNEL_HPP
#define PMLDPE_CHANNEL_HPP

#include "pmldpe/geometry.hpp"
#include "pmldpe/types.hpp"

#include <vector>

namespace pmldpe
{
    // How NLOS amplitudes follow the power delay profile
    enum class AmplitudeLaw
    {
        sqrt_pdp, // a = sqrt(P(tau)), the PDP read as a power profile
        pdp,      // a = P(tau)
    };

    struct ChannelParams
    {
        double path_loss_exponent = 4.0;     // eta
        double reference_distance = 1.0;     // d0, m
        double coherence_bandwidth = 250e3;  // B_c, Hz
        double doppler_spread = 512.0;       // B_D, Hz
        double coherence_time = 0.0;         // T_c, s; 0 means 1/B_D
        double rms_delay_spread = 677e-9;    // sigma_tau, s
        double transmit_power_dbm = 18.0;    // P_T
        double carrier_frequency = 5.9e9;    // f_c, Hz
        AmplitudeLaw amplitude_law = AmplitudeLaw::sqrt_pdp;

        // Throws Error when an invariant is violated
        void validate() const;

        double effective_coherence_time() const;
    };

    struct PathComponent
    {
        GlobalBearing aoa;
        Complex beta;
        double delay = 0.0; // s
    };

    struct MultipathRealization
    {
        GlobalBearing los_aoa;
        bool los_blocked = false;
        Complex gamma;
        std::vector<PathComponent> paths;

        int path_count() const { return static_cast<int>(paths.size()); }
    };

    // One received block Y_i (M x N) together with its known training symbols
    struct Observation
    {
        ComplexMatrix samples;
        ComplexVector symbols;
        double timestamp = 0.0;
        int bs_id = 0;

        int snapshots() const { return static_cast<int>(samples.cols()); }
    };

    // P(tau) = exp(-tau / sigma_tau)
    double power_delay_profile(double delay, const ChannelParams &params);

    // NLOS amplitude for a given delay under the configured law
    double path_amplitude(double delay, const ChannelParams &params);

    // 10 eta log10(d / d0)
    double path_loss_db(double distance, const ChannelParams &params);

    // |gamma| for a link of the given length (sqrt of received power in W)
    double large_scale_amplitude(double distance, const ChannelParams &params);

    // Draws D NLOS paths with uniform directions, phases and integer cycle offsets, plus the
    // large-scale amplitude gamma with uniform phase.
    MultipathRealization sample_multipath(Rng &rng, const ChannelParams &params, int path_count, double distance,
                                          GlobalBearing los_aoa, bool los_blocked);

    // y_n = gamma (x_LOS + x_NLOS) c_n + noise, with unit-modulus QPSK symbols
    Observation generate_observation(Rng &rng, const MultipathRealization &realization, GlobalBearing heading,
                                     const ArrayConfig &cfg, int snapshots, double noise_power);

    // Noiseless array response gamma (x_LOS + x_NLOS) as seen with the given heading
    ComplexVector noiseless_response(const MultipathRealization &realization, GlobalBearing heading,
                                     const ArrayConfig &cfg);

    // Thermal noise power k_B T_0 B
    double thermal_noise_power(double bandwidth);

    // |gamma|^2 / sigma^2 in dB
    double snr_at(double distance, const ChannelParams &params, double noise_power);

    // Unit-modulus QPSK symbol exp(j (pi/4 + k pi/2))
    Complex qpsk_symbol(int k);

    // Circularly symmetric complex Gaussian draw with the given variance
    Complex complex_gaussian(Rng &rng, double variance);
}

#endif
