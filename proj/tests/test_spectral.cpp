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
#include "support.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <doctest.h>
#include <numeric>
#include <sstream>

using namespace pmldpe;

namespace
{
    ComplexMatrix persymmetry_residual(const ComplexMatrix &r)
    {
        return exchange_conjugate(r) - r;
    }

    Eigen::VectorXd eigenvalues(const ComplexMatrix &r)
    {
        return Eigen::SelfAdjointEigenSolver<ComplexMatrix>(r, Eigen::EigenvaluesOnly).eigenvalues();
    }

    double nearest_sine_gap(const std::vector<LocalAoa> &est, double theta)
    {
        double best = 10.0;
        for (const auto &a : est)
            best = std::min(best, std::abs(a.sine() - std::sin(theta)));
        return best;
    }
}

TEST_CASE("forward covariance examples")
{
    Rng rng(1);
    const ComplexMatrix y = test::random_matrix(rng, 6, 10);
    const SmoothedCovariance full = forward_covariance(y, 6);
    CHECK(full.kind == SmoothingKind::forward_only);
    CHECK((full.matrix - y * y.adjoint() / 10.0).norm() < 1e-13);

    CHECK(forward_covariance(ComplexMatrix::Zero(8, 4), 4).matrix.norm() == 0.0);
    CHECK_THROWS_AS(forward_covariance(y, 7), Error);
    CHECK_THROWS_AS(forward_covariance(y, 0), Error);

    // Overlapped subarray average against a direct loop
    const SmoothedCovariance sm = forward_covariance(y, 4);
    ComplexMatrix oracle = ComplexMatrix::Zero(4, 4);
    for (int s = 0; s < 3; ++s)
        oracle += y.middleRows(s, 4) * y.middleRows(s, 4).adjoint() / 10.0;
    oracle /= 3.0;
    CHECK((sm.matrix - oracle).norm() < 1e-13);
}

TEST_CASE("spatial smoothing restores rank for coherent sources")
{
    const ArrayConfig cfg(8, 4, 5.9e9);
    Rng rng(4);
    const ComplexVector c = test::qpsk_sequence(rng, 16);
    const Observation obs = test::plane_waves({-0.4, 0.5}, {Complex(1, 0), Complex(0, 1)}, c, cfg);

    const ComplexMatrix plain = obs.samples.topRows(4) * obs.samples.topRows(4).adjoint() / 16.0;
    const Eigen::VectorXd ev_plain = eigenvalues(plain);
    CHECK(ev_plain[2] / ev_plain[3] < 1e-8);

    const Eigen::VectorXd ev_fo = eigenvalues(forward_covariance(obs.samples, 4).matrix);
    CHECK(ev_fo[2] / ev_fo[3] > 1e-3);
    const Eigen::VectorXd ev_fb = eigenvalues(fb_covariance(forward_covariance(obs.samples, 4)).matrix);
    CHECK(ev_fb[2] / ev_fb[3] > 1e-3);
    CHECK(ev_fb[1] / ev_fb[3] < 1e-6);
}

TEST_CASE("forward-backward covariance")
{
    const SmoothedCovariance eye{ComplexMatrix::Identity(5, 5), SmoothingKind::forward_only};
    CHECK((fb_covariance(eye).matrix - eye.matrix).norm() == 0.0);
    CHECK(fb_covariance(eye).kind == SmoothingKind::forward_backward);

    // Real symmetric Toeplitz is persymmetric and stays unchanged
    ComplexMatrix toeplitz(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            toeplitz(i, j) = 1.0 / (1.0 + std::abs(i - j));
    CHECK((fb_covariance({toeplitz, SmoothingKind::forward_only}).matrix - toeplitz).norm() < 1e-15);

    CHECK_THROWS_AS(fb_covariance(fb_covariance(eye)), Error);

    Rng rng(8);
    for (int i = 0; i < 50; ++i)
    {
        const ComplexMatrix a = test::random_matrix(rng, 7, 7);
        const ComplexMatrix h = (a + a.adjoint()) / 2.0;
        const ComplexMatrix r = fb_covariance({h, SmoothingKind::forward_only}).matrix;
        REQUIRE(persymmetry_residual(r).norm() < 1e-12);
        REQUIRE((r - r.adjoint()).norm() < 1e-12);
    }
}

TEST_CASE("smoothed covariances are Hermitian positive semidefinite")
{
    Rng rng(12);
    for (int i = 0; i < 30; ++i)
    {
        const ComplexMatrix y = test::random_matrix(rng, 23, 16);
        for (const auto &r : {forward_covariance(y, 16), fb_covariance(forward_covariance(y, 16))})
        {
            REQUIRE((r.matrix - r.matrix.adjoint()).norm() < 1e-10);
            const Eigen::VectorXd ev = eigenvalues(r.matrix);
            REQUIRE(ev.minCoeff() >= -1e-10 * ev.maxCoeff());
        }
    }
}

TEST_CASE("angular grid is uniform in sine")
{
    const AngularGrid g(2048);
    CHECK(g.size() == 2048);
    CHECK(g.step() == doctest::Approx(2.0 / 2048));
    CHECK(g.sine(0) == doctest::Approx(-1.0 + 1.0 / 2048));
    CHECK(g.sine(2047) == doctest::Approx(1.0 - 1.0 / 2048));
    CHECK(g.angle(1024) == doctest::Approx(std::asin(g.sine(1024))));
    CHECK_THROWS_AS(AngularGrid(1), Error);
}

TEST_CASE("smooth_music single noiseless source")
{
    const ArrayConfig cfg(16, 16, 5.9e9);
    const AngularGrid grid(2048);
    Rng rng(2);
    const Observation obs = test::plane_waves({0.3}, {Complex(1, 0)}, test::qpsk_sequence(rng, 16), cfg);
    const MusicResult res = smooth_music(forward_covariance(obs.samples, 16), 1, grid, cfg);
    REQUIRE(res.angles.size() == 1);
    CHECK(std::abs(res.angles[0].sine() - std::sin(0.3)) <= grid.step());
    CHECK_FALSE(res.degenerate);
    CHECK(res.pseudospectrum.size() == 2048);
    CHECK_THROWS_AS(smooth_music(forward_covariance(obs.samples, 16), 16, grid, cfg), Error);
    CHECK_THROWS_AS(smooth_music(forward_covariance(obs.samples, 16), 0, grid, cfg), Error);
}

TEST_CASE("smooth_music on white covariance is flagged degenerate")
{
    const ArrayConfig cfg(8, 8, 5.9e9);
    const MusicResult res = smooth_music({ComplexMatrix::Identity(8, 8), SmoothingKind::forward_backward}, 3,
                                         AngularGrid(256), cfg);
    CHECK(res.degenerate);
    CHECK(res.angles.size() == 3);
}

TEST_CASE("three coherent sources with FBSS")
{
    const ArrayConfig cfg(23, 16, 5.9e9);
    const AngularGrid grid(2048);
    Rng rng(31);
    const std::vector<double> angles{-0.45, 0.05, 0.6};
    int hits = 0;
    for (int draw = 0; draw < 100; ++draw)
    {
        std::vector<Complex> gains;
        for (int s = 0; s < 3; ++s)
            gains.push_back(std::polar(1.0, test::uniform(rng, 0, two_pi)));
        Observation obs = test::plane_waves(angles, gains, test::qpsk_sequence(rng, 16), cfg);
        obs.samples += test::random_matrix(rng, 23, 16, 0.01); // 20 dB per source
        const AoaEstimateSet est = estimate_aoas(obs.samples, obs.symbols, 3, grid, cfg);
        bool ok = true;
        for (double th : angles)
            ok = ok && nearest_sine_gap(est.angles, th) <= grid.step();
        hits += ok;
    }
    CHECK(hits >= 95);
}

TEST_CASE("smooth_music is invariant to snapshot order")
{
    const ArrayConfig cfg(23, 16, 5.9e9);
    const AngularGrid grid(1024);
    Rng rng(6);
    Observation obs = test::plane_waves({-0.2, 0.4}, {Complex(1, 0), Complex(0.5, 0.5)}, test::qpsk_sequence(rng, 16),
                                       cfg);
    obs.samples += test::random_matrix(rng, 23, 16, 0.01);
    const MusicResult a = smooth_music(fb_covariance(forward_covariance(obs.samples, 16)), 2, grid, cfg);
    std::vector<int> order(16);
    std::iota(order.begin(), order.end(), 0);
    std::reverse(order.begin(), order.end());
    std::swap(order[3], order[9]);
    ComplexMatrix shuffled(23, 16);
    for (int n = 0; n < 16; ++n)
        shuffled.col(n) = obs.samples.col(order[n]);
    const MusicResult b = smooth_music(fb_covariance(forward_covariance(shuffled, 16)), 2, grid, cfg);
    REQUIRE(a.angles.size() == b.angles.size());
    for (std::size_t i = 0; i < a.angles.size(); ++i)
        CHECK(a.angles[i].radians() == doctest::Approx(b.angles[i].radians()).epsilon(1e-9));
}

TEST_CASE("Capon weights")
{
    const ArrayConfig cfg(12, 6, 5.9e9);
    const SmoothedCovariance eye{ComplexMatrix::Identity(6, 6), SmoothingKind::forward_backward};
    const ComplexVector w = capon_weights(eye, LocalAoa(0.3), cfg);
    CHECK((w - steering(LocalAoa(0.3), 6, cfg) / 6.0).norm() < 1e-12);

    Rng rng(14);
    for (int i = 0; i < 20; ++i)
    {
        const SmoothedCovariance r = fb_covariance(forward_covariance(test::random_matrix(rng, 12, 16), 6));
        const LocalAoa look(test::uniform(rng, -1.5, 1.5));
        REQUIRE(std::abs(capon_weights(r, look, cfg).dot(steering(look, 6, cfg)) - 1.0) < 1e-10);
    }

    CHECK_THROWS_AS(CaponBeamformer({ComplexMatrix::Zero(6, 6), SmoothingKind::forward_backward}), Error);
}

TEST_CASE("Capon attenuates an interferer")
{
    const ArrayConfig cfg(16, 16, 5.9e9);
    const double look = 0.1;
    const double interferer = -0.5;
    const ComplexVector a0 = steering(LocalAoa(look), 16, cfg);
    const ComplexVector a1 = steering(LocalAoa(interferer), 16, cfg);
    // Uncorrelated sources at unit power, noise 20 dB below
    const ComplexMatrix r =
        a0 * a0.adjoint() + a1 * a1.adjoint() + 0.01 * ComplexMatrix::Identity(16, 16);
    const ComplexVector w = capon_weights({r, SmoothingKind::forward_backward}, LocalAoa(look), cfg);
    CHECK(std::abs(w.dot(a0) - 1.0) < 1e-10);
    CHECK(std::abs(w.dot(a1)) < 0.2);
}

TEST_CASE("amplitude estimates")
{
    const ArrayConfig cfg(8, 4, 5.9e9);
    const ComplexVector c = ComplexVector::Ones(16);
    const Observation obs = test::plane_waves({0.25}, {Complex(2, 0)}, c, cfg);
    const SmoothedCovariance r = fb_covariance(forward_covariance(obs.samples, 4));
    const ComplexVector w = capon_weights(r, LocalAoa(0.25), cfg);
    const ComplexVector alpha = estimate_amplitudes({w}, obs.samples.topRows(4), c);
    CHECK(std::abs(alpha[0] - Complex(2, 0)) < 1e-6);

    const ComplexVector zero = estimate_amplitudes({w}, ComplexMatrix::Zero(4, 16), c);
    CHECK(zero.norm() == 0.0);

    const AoaEstimateSet none = estimate_aoas(ComplexMatrix::Zero(8, 16), c, 1, AngularGrid(128), cfg);
    CHECK(none.amplitudes.norm() == 0.0);
    CHECK(none.angles.size() == 1);

    CHECK_THROWS_AS(estimate_amplitudes({w}, obs.samples.topRows(4), ComplexVector::Ones(3)), Error);
    CHECK_THROWS_AS(estimate_amplitudes({w}, obs.samples.topRows(4), ComplexVector::Zero(16)), Error);
}

TEST_CASE("pseudospectrum CSV")
{
    const AngularGrid grid(4);
    RealVector s(4);
    s << 1, 2, 3, 4;
    std::ostringstream os;
    write_pseudospectrum_csv(os, s, grid);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "angle_rad,power");
    int rows = 0;
    while (std::getline(is, line))
        ++rows;
    CHECK(rows == 4);
}
