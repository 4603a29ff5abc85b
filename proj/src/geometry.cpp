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

#include "pmldpe/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pmldpe
{
    double distance(const Position &a, const Position &b)
    {
        return std::hypot(a.x - b.x, a.y - b.y);
    }

    double Velocity::speed() const
    {
        return std::hypot(vx, vy);
    }

    GlobalBearing::GlobalBearing(double radians)
    {
        if (!std::isfinite(radians))
            throw Error("GlobalBearing: angle must be finite");
        double a = std::fmod(radians, two_pi);
        if (a < 0.0)
            a += two_pi;
        if (a >= two_pi) // fmod of a tiny negative number can round up
            a = 0.0;
        angle_ = a;
    }

    LocalAoa::LocalAoa(double radians)
    {
        if (!std::isfinite(radians) || radians < -0.5 * pi || radians > 0.5 * pi)
            throw Error("LocalAoa: angle " + std::to_string(radians) + " outside [-pi/2, pi/2]");
        angle_ = radians;
    }

    LocalAoa LocalAoa::from_sine(double s)
    {
        return LocalAoa(std::asin(std::clamp(s, -1.0, 1.0)));
    }

    double LocalAoa::sine() const
    {
        return std::sin(angle_);
    }

    ArrayConfig::ArrayConfig(int element_count, int subarray_length, double carrier_frequency)
        : element_count_(element_count), subarray_length_(subarray_length), carrier_frequency_(carrier_frequency)
    {
        if (element_count < 1)
            throw Error("ArrayConfig: element count must be at least 1");
        if (subarray_length < 1 || subarray_length > element_count)
            throw Error("ArrayConfig: subarray length must satisfy 1 <= P <= M");
        if (!(carrier_frequency > 0.0) || !std::isfinite(carrier_frequency))
            throw Error("ArrayConfig: carrier frequency must be positive");
    }

    GlobalBearing los_bearing(const Position &bs, const Position &ms)
    {
        const double dx = bs.x - ms.x, dy = bs.y - ms.y;
        if (dx == 0.0 && dy == 0.0)
            throw Error("los_bearing: BS and MS positions coincide");
        return GlobalBearing(std::atan2(dy, dx));
    }

    GlobalBearing heading_of(const Velocity &v)
    {
        return GlobalBearing(std::atan2(v.vy, v.vx));
    }

    LocalAoa global_to_local(GlobalBearing bearing, GlobalBearing heading)
    {
        return LocalAoa::from_sine(std::sin(bearing.radians() - heading.radians()));
    }

    ComplexVector steering_from_sine(double sine, int length, const ArrayConfig &cfg)
    {
        const double phase = cfg.wavenumber() * cfg.element_spacing() * sine;
        ComplexVector a(length);
        for (int k = 0; k < length; ++k)
            a[k] = std::polar(1.0, phase * k);
        return a;
    }

    ComplexVector steering(LocalAoa aoa, int length, const ArrayConfig &cfg)
    {
        if (length < 1)
            throw Error("steering: length must be at least 1");
        return steering_from_sine(aoa.sine(), length, cfg);
    }

    std::vector<Position> reconstruct_trajectory(const Position &p0, std::span<const VelocitySegment> segments)
    {
        std::vector<Position> out;
        out.reserve(segments.size());
        double sx = 0.0, sy = 0.0;
        for (const auto &seg : segments)
        {
            if (!(seg.duration > 0.0))
                throw Error("reconstruct_trajectory: time increments must be positive");
            sx += seg.velocity.vx * seg.duration;
            sy += seg.velocity.vy * seg.duration;
            out.push_back({p0.x + sx, p0.y + sy});
        }
        return out;
    }

    GlobalBearing HeadingTracker::update(const Velocity &v)
    {
        if (v.vx != 0.0 || v.vy != 0.0)
            heading_ = heading_of(v);
        return heading_;
    }
}
