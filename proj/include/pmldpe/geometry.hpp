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

#ifndef PMLDPE_GEOMETRY_HPP
#define PMLDPE_GEOMETRY_HPP

#include "pmldpe/types.hpp"

#include <span>
#include <vector>

namespace pmldpe
{
    // Planar position in meters
    struct Position
    {
        double x = 0.0;
        double y = 0.0;

        Position operator+(const Position &o) const { return {x + o.x, y + o.y}; }
        Position operator-(const Position &o) const { return {x - o.x, y - o.y}; }
        bool operator==(const Position &) const = default;
    };

    double distance(const Position &a, const Position &b);

    // Planar velocity in m/s
    struct Velocity
    {
        double vx = 0.0;
        double vy = 0.0;

        double speed() const;
        bool operator==(const Velocity &) const = default;
    };

    // Angle in the global frame, counterclockwise from the x-axis, wrapped to [0, 2*pi)
    class GlobalBearing
    {
    public:
        GlobalBearing() = default;
        explicit GlobalBearing(double radians);

        double radians() const { return angle_; }

    private:
        double angle_ = 0.0;
    };

    // Angle seen by the ULA, measured from the array normal (the heading), in [-pi/2, pi/2].
    // Rear half-plane directions are folded onto the front angle with the same sine.
    class LocalAoa
    {
    public:
        LocalAoa() = default;
        explicit LocalAoa(double radians);

        // Construct from the sine of the angle; the argument is clamped to [-1, 1]
        static LocalAoa from_sine(double s);

        double radians() const { return angle_; }
        double sine() const;

    private:
        double angle_ = 0.0;
    };

    // Half-wavelength ULA with M elements and smoothing subarrays of length P
    class ArrayConfig
    {
    public:
        ArrayConfig(int element_count, int subarray_length, double carrier_frequency);

        int element_count() const { return element_count_; }
        int subarray_length() const { return subarray_length_; }
        int subarray_count() const { return element_count_ - subarray_length_ + 1; }
        double carrier_frequency() const { return carrier_frequency_; }
        double wavelength() const { return speed_of_light / carrier_frequency_; }
        double element_spacing() const { return 0.5 * wavelength(); }
        double wavenumber() const { return two_pi / wavelength(); }

    private:
        int element_count_;
        int subarray_length_;
        double carrier_frequency_;
    };

    // Bearing of the BS as seen from the MS (four-quadrant inverse tangent).
    // Throws Error when both points coincide.
    GlobalBearing los_bearing(const Position &bs, const Position &ms);

    // Direction of motion; zero velocity maps to 0 (see HeadingTracker)
    GlobalBearing heading_of(const Velocity &v);

    // Maps a global bearing into the array frame: asin(sin(bearing - heading))
    LocalAoa global_to_local(GlobalBearing bearing, GlobalBearing heading);

    // Steering vector with elements exp(j k w d sin(theta)), k = 0 .. length-1
    ComplexVector steering(LocalAoa aoa, int length, const ArrayConfig &cfg);

    // Element k of the steering vector for a given sine; shared by hot loops
    ComplexVector steering_from_sine(double sine, int length, const ArrayConfig &cfg);

    // Piecewise constant velocity over a time increment
    struct VelocitySegment
    {
        Velocity velocity;
        double duration = 0.0; // seconds, must be > 0
    };

    // Kinematic reconstruction. Entry k is p0 plus the displacement of the first k+1 segments.
    std::vector<Position> reconstruct_trajectory(const Position &p0, std::span<const VelocitySegment> segments);

    // Keeps the last valid heading when the velocity is exactly zero
    class HeadingTracker
    {
    public:
        explicit HeadingTracker(GlobalBearing initial = GlobalBearing(0.0)) : heading_(initial) {}

        GlobalBearing update(const Velocity &v);
        GlobalBearing current() const { return heading_; }

    private:
        GlobalBearing heading_;
    };
}

#endif
