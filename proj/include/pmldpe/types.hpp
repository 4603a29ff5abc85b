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

#ifndef PMLDPE_TYPES_HPP
#define PMLDPE_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/random/mersenne_twister.hpp>

namespace pmldpe
{
    using Complex = std::complex<double>;
    using ComplexVector = Eigen::VectorXcd;
    using ComplexMatrix = Eigen::MatrixXcd;
    using RealVector = Eigen::VectorXd;

    // Portable across standard libraries, unlike std:: distributions
    using Rng = boost::random::mt19937_64;

    inline constexpr double pi = std::numbers::pi;
    inline constexpr double two_pi = 2.0 * std::numbers::pi;
    inline constexpr double speed_of_light = 299792458.0;  // m/s
    inline constexpr double boltzmann = 1.380649e-23;      // J/K
    inline constexpr double standard_temperature = 290.0;  // K

    // Base class for every error raised by the library
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    inline double deg2rad(double deg) { return deg * pi / 180.0; }
    inline double rad2deg(double rad) { return rad * 180.0 / pi; }
    inline double kmh2ms(double kmh) { return kmh / 3.6; }
}

#endif
