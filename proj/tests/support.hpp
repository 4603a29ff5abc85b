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

#ifndef PMLDPE_TESTS_SUPPORT_HPP
#define PMLDPE_TESTS_SUPPORT_HPP

#include "pmldpe/channel.hpp"
#include "pmldpe/geometry.hpp"
#include "pmldpe/types.hpp"

#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <cmath>

namespace pmldpe::test
{
    inline ComplexMatrix random_matrix(Rng &rng, int rows, int cols, double variance = 1.0)
    {
        ComplexMatrix y(rows, cols);
        for (int c = 0; c < cols; ++c)
            for (int r = 0; r < rows; ++r)
                y(r, c) = complex_gaussian(rng, variance);
        return y;
    }

    inline ComplexVector qpsk_sequence(Rng &rng, int n)
    {
        boost::random::uniform_int_distribution<int> k(0, 3);
        ComplexVector c(n);
        for (int i = 0; i < n; ++i)
            c[i] = qpsk_symbol(k(rng));
        return c;
    }

    // Independent evaluation of one steering element: exp(j k w d sin(theta)) with d = lambda / 2
    inline Complex steering_element(double theta, int k)
    {
        return std::polar(1.0, pi * k * std::sin(theta));
    }

    // Noiseless observation of a set of plane waves with given local angles and complex gains
    inline Observation plane_waves(const std::vector<double> &angles, const std::vector<Complex> &gains,
                                   const ComplexVector &symbols, const ArrayConfig &cfg)
    {
        ComplexVector x = ComplexVector::Zero(cfg.element_count());
        for (std::size_t i = 0; i < angles.size(); ++i)
            x += gains[i] * steering(LocalAoa(angles[i]), cfg.element_count(), cfg);
        Observation obs;
        obs.samples = x * symbols.transpose();
        obs.symbols = symbols;
        return obs;
    }

    inline double uniform(Rng &rng, double lo, double hi)
    {
        return boost::random::uniform_real_distribution<double>(lo, hi)(rng);
    }
}

#endif
