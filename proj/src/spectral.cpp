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

#include "pmldpe/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace pmldpe
{
    AngularGrid::AngularGrid(int points)
    {
        if (points < 3)
            throw Error("AngularGrid: at least 3 points are required");
        step_ = 2.0 / points;
        sines_.resize(points);
        for (int k = 0; k < points; ++k)
            sines_[k] = -1.0 + (k + 0.5) * step_;
    }

    double AngularGrid::angle(int k) const
    {
        return std::asin(sines_[k]);
    }

    SmoothedCovariance forward_covariance(const ComplexMatrix &samples, int subarray_length)
    {
        const int m = static_cast<int>(samples.rows());
        const int n = static_cast<int>(samples.cols());
        if (subarray_length < 1 || subarray_length > m)
            throw Error("forward_covariance: subarray length must satisfy 1 <= P <= M");
        if (n < 1)
            throw Error("forward_covariance: at least one snapshot is required");

        const int p = subarray_length;
        const int s = m - p + 1;
        ComplexMatrix r = ComplexMatrix::Zero(p, p);
        for (int j = 0; j < s; ++j)
        {
            const auto block = samples.middleRows(j, p);
            r.noalias() += block * block.adjoint();
        }
        r /= static_cast<double>(s) * n;
        return {r, SmoothingKind::forward_only};
    }

    ComplexMatrix exchange_conjugate(const ComplexMatrix &r)
    {
        // (J conj(R) J)(a, b) = conj(R(P-1-a, P-1-b))
        return r.reverse().conjugate();
    }

    SmoothedCovariance fb_covariance(const SmoothedCovariance &fo)
    {
        if (fo.kind != SmoothingKind::forward_only)
            throw Error("fb_covariance: input must be a forward-only covariance");
        ComplexMatrix r = 0.5 * (fo.matrix + exchange_conjugate(fo.matrix));
        return {std::move(r), SmoothingKind::forward_backward};
    }

    namespace
    {
        struct Peak
        {
            int index;
            double height;
        };

        // Three-point parabolic refinement on the log spectrum, in units of grid steps
        double parabolic_offset(const RealVector &spec, int k)
        {
            if (k <= 0 || k >= spec.size() - 1)
                return 0.0;
            const double lo = std::log(spec[k - 1]), mid = std::log(spec[k]), hi = std::log(spec[k + 1]);
            const double denom = lo - 2.0 * mid + hi;
            if (!(denom < 0.0))
                return 0.0;
            return std::clamp(0.5 * (lo - hi) / denom, -0.5, 0.5);
        }
    }

    MusicResult smooth_music(const SmoothedCovariance &r, int signal_dim, const AngularGrid &grid,
                             const ArrayConfig &cfg)
    {
        const int p = static_cast<int>(r.matrix.rows());
        if (signal_dim < 1)
            throw Error("smooth_music: signal dimension must be at least 1");
        if (signal_dim >= p)
            throw Error("smooth_music: signal dimension " + std::to_string(signal_dim) +
                        " leaves no noise subspace for subarray length " + std::to_string(p));

        Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(r.matrix);
        if (eig.info() != Eigen::Success)
            throw Error("smooth_music: eigendecomposition failed");
        // eigenvalues ascend, so the noise subspace is the leading block of columns
        const ComplexMatrix noise = eig.eigenvectors().leftCols(p - signal_dim);

        const int g = grid.size();
        MusicResult out;
        out.pseudospectrum.resize(g);
        const double tiny = std::numeric_limits<double>::min();
        for (int k = 0; k < g; ++k)
        {
            const ComplexVector a = steering_from_sine(grid.sine(k), p, cfg);
            const double denom = (noise.adjoint() * a).squaredNorm();
            out.pseudospectrum[k] = 1.0 / std::max(denom, tiny);
        }

        const RealVector &spec = out.pseudospectrum;
        const double top = spec.maxCoeff(), bottom = spec.minCoeff();
        out.degenerate = (top - bottom) <= 1e-9 * top;

        std::vector<Peak> peaks;
        if (!out.degenerate)
        {
            for (int k = 0; k < g; ++k)
            {
                const bool left = k == 0 || spec[k] > spec[k - 1];
                const bool right = k == g - 1 || spec[k] > spec[k + 1];
                if (left && right)
                    peaks.push_back({k, spec[k]});
            }
        }
        auto by_height = [](const Peak &a, const Peak &b)
        { return a.height != b.height ? a.height > b.height : a.index < b.index; };
        std::sort(peaks.begin(), peaks.end(), by_height);
        if (static_cast<int>(peaks.size()) > signal_dim)
            peaks.resize(signal_dim);

        for (const auto &pk : peaks)
        {
            const double s = grid.sine(pk.index) + parabolic_offset(spec, pk.index) * grid.step();
            out.angles.push_back(LocalAoa::from_sine(s));
        }

        if (static_cast<int>(peaks.size()) < signal_dim)
        {
            std::vector<char> used(g, 0);
            for (const auto &pk : peaks)
                used[pk.index] = 1;
            std::vector<Peak> rest;
            rest.reserve(g);
            for (int k = 0; k < g; ++k)
                if (!used[k])
                    rest.push_back({k, spec[k]});
            const auto need = static_cast<std::size_t>(signal_dim) - peaks.size();
            std::partial_sort(rest.begin(), rest.begin() + need, rest.end(), by_height);
            for (std::size_t i = 0; i < need; ++i)
                out.angles.push_back(LocalAoa::from_sine(grid.sine(rest[i].index)));
            out.padded = static_cast<int>(need);
        }
        return out;
    }

    CaponBeamformer::CaponBeamformer(const SmoothedCovariance &r, double loading)
        : size_(static_cast<int>(r.matrix.rows()))
    {
        const double trace = r.matrix.trace().real();
        const double eps = loading * trace / size_;
        if (!(eps > 0.0) || !std::isfinite(eps))
            throw Error("CaponBeamformer: covariance is singular (zero trace)");
        ComplexMatrix loaded = r.matrix;
        loaded.diagonal().array() += eps;
        llt_.compute(loaded);
        if (llt_.info() != Eigen::Success)
            throw Error("CaponBeamformer: loaded covariance is not positive definite");
    }

    ComplexVector CaponBeamformer::weights_from_sine(double sine, const ArrayConfig &cfg) const
    {
        const ComplexVector a = steering_from_sine(sine, size_, cfg);
        ComplexVector b = llt_.solve(a);
        const Complex gain = a.dot(b); // a^H R^-1 a
        return b / gain;
    }

    ComplexVector CaponBeamformer::weights(LocalAoa look, const ArrayConfig &cfg) const
    {
        return weights_from_sine(look.sine(), cfg);
    }

    ComplexVector capon_weights(const SmoothedCovariance &r, LocalAoa look, const ArrayConfig &cfg, double loading)
    {
        return CaponBeamformer(r, loading).weights(look, cfg);
    }

    ComplexVector estimate_amplitudes(const std::vector<ComplexVector> &weights, const ComplexMatrix &reference_samples,
                                      const ComplexVector &symbols)
    {
        if (reference_samples.cols() != symbols.size())
            throw Error("estimate_amplitudes: snapshot count and symbol count differ");
        const double energy = symbols.squaredNorm();
        if (!(energy > 0.0))
            throw Error("estimate_amplitudes: symbols carry no energy");

        // sum_n y_n conj(c_n)
        const ComplexVector matched = reference_samples * symbols.conjugate();
        ComplexVector out(static_cast<Eigen::Index>(weights.size()));
        for (std::size_t s = 0; s < weights.size(); ++s)
        {
            if (weights[s].size() != reference_samples.rows())
                throw Error("estimate_amplitudes: weight length does not match subarray length");
            out[static_cast<Eigen::Index>(s)] = weights[s].dot(matched) / energy;
        }
        return out;
    }

    AoaEstimateSet estimate_aoas(const ComplexMatrix &samples, const ComplexVector &symbols, int signal_dim,
                                 const AngularGrid &grid, const ArrayConfig &cfg)
    {
        const int p = cfg.subarray_length();
        const SmoothedCovariance fb = fb_covariance(forward_covariance(samples, p));
        MusicResult music = smooth_music(fb, signal_dim, grid, cfg);

        AoaEstimateSet out;
        out.degenerate = music.degenerate;
        out.padded = music.padded;
        out.pseudospectrum = std::move(music.pseudospectrum);
        out.angles = std::move(music.angles);

        std::vector<ComplexVector> weights;
        weights.reserve(out.angles.size());
        if (fb.matrix.trace().real() > 0.0)
        {
            const CaponBeamformer bf(fb);
            for (const auto &th : out.angles)
                weights.push_back(bf.weights(th, cfg));
            out.amplitudes = estimate_amplitudes(weights, samples.topRows(p), symbols);
        }
        else
        {
            out.amplitudes = ComplexVector::Zero(static_cast<Eigen::Index>(out.angles.size()));
        }
        return out;
    }

    void write_pseudospectrum_csv(std::ostream &os, const RealVector &spectrum, const AngularGrid &grid)
    {
        if (spectrum.size() != grid.size())
            throw Error("write_pseudospectrum_csv: spectrum and grid sizes differ");
        const auto old = os.precision(17);
        os << "angle_rad,power\n";
        for (int k = 0; k < grid.size(); ++k)
            os << grid.angle(k) << ',' << spectrum[k] << '\n';
        os.precision(old);
    }
}
