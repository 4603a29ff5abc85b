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

#ifndef PMLDPE_SPECTRAL_HPP
#define PMLDPE_SPECTRAL_HPP

#include "pmldpe/geometry.hpp"
#include "pmldpe/types.hpp"

#include <Eigen/Cholesky>

#include <iosfwd>
#include <vector>

namespace pmldpe
{
    enum class SmoothingKind
    {
        forward_only,
        forward_backward,
    };

    struct SmoothedCovariance
    {
        ComplexMatrix matrix; // P x P
        SmoothingKind kind = SmoothingKind::forward_only;
    };

    // Sampling of (-pi/2, pi/2) that is uniform in sin(theta)
    class AngularGrid
    {
    public:
        explicit AngularGrid(int points = 2048);

        int size() const { return static_cast<int>(sines_.size()); }
        double sine(int k) const { return sines_[k]; }
        double angle(int k) const;
        double step() const { return step_; } // spacing in sine

    private:
        std::vector<double> sines_;
        double step_;
    };

    struct MusicResult
    {
        std::vector<LocalAoa> angles;  // sorted by descending peak height
        RealVector pseudospectrum;     // sampled on the grid
        bool degenerate = false;       // flat spectrum, angles are arbitrary
        int padded = 0;                // angles taken from non-peak grid points
    };

    struct AoaEstimateSet
    {
        std::vector<LocalAoa> angles;
        ComplexVector amplitudes;
        RealVector pseudospectrum;
        bool degenerate = false;
        int padded = 0;
    };

    // Mean over the S = M - P + 1 overlapped subarrays of (1/N) Y_j Y_j^H
    SmoothedCovariance forward_covariance(const ComplexMatrix &samples, int subarray_length);

    // (R + J conj(R) J) / 2
    SmoothedCovariance fb_covariance(const SmoothedCovariance &fo);

    // J conj(R) J
    ComplexMatrix exchange_conjugate(const ComplexMatrix &r);

    // MUSIC pseudospectrum over the reference subarray. Throws when signal_dim >= P.
    MusicResult smooth_music(const SmoothedCovariance &r, int signal_dim, const AngularGrid &grid,
                             const ArrayConfig &cfg);

    // Diagonal loading applied before any inversion: 1e-6 trace(R) / P
    inline constexpr double default_loading = 1e-6;

    /// MVDR/Capon beamformer over a fixed covariance. The loaded covariance is factorized once
    /// so weights for many look directions cost O(P^2) each.
    class CaponBeamformer
    {
    public:
        explicit CaponBeamformer(const SmoothedCovariance &r, double loading = default_loading);

        ComplexVector weights(LocalAoa look, const ArrayConfig &cfg) const;
        ComplexVector weights_from_sine(double sine, const ArrayConfig &cfg) const;

        int size() const { return size_; }

    private:
        int size_;
        Eigen::LLT<ComplexMatrix> llt_;
    };

    // w = R^-1 a / (a^H R^-1 a) on the reference subarray
    ComplexVector capon_weights(const SmoothedCovariance &r, LocalAoa look, const ArrayConfig &cfg,
                                double loading = default_loading);

    // Symbol-matched, snapshot-averaged beamformer outputs, one per weight vector
    ComplexVector estimate_amplitudes(const std::vector<ComplexVector> &weights, const ComplexMatrix &reference_samples,
                                      const ComplexVector &symbols);

    // Full per-observation chain: FBSS, smooth-MUSIC, FBSS-Capon amplitudes
    AoaEstimateSet estimate_aoas(const ComplexMatrix &samples, const ComplexVector &symbols, int signal_dim,
                                 const AngularGrid &grid, const ArrayConfig &cfg);

    // Writes "angle_rad,power" rows
    void write_pseudospectrum_csv(std::ostream &os, const RealVector &spectrum, const AngularGrid &grid);
}

#endif
