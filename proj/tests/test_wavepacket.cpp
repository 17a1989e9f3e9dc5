// Copyright 2026 The synswap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles/quadrature.hpp"
#include "synswap/wavepacket.hpp"

using namespace synswap;
using namespace synswap::wavepacket;

namespace {

// Frozen from oracle::filtered_wavepacket_fwhm (quadrature Fourier transform
// of a filter that is Gaussian in wavelength).
constexpr double kOracleTau788_2p8 = 326.41161;
constexpr double kOracleTau788_5p6 = 163.190374;
constexpr double kOracleTau1576_2p8 = 1305.677302;

WavepacketParams photon(double tau, double offset = 0.0, double pump = 0.0) {
    return {tau, offset, pump};
}

} // namespace

TEST(CoherenceTime, NominalFilter) {
    const FilterSpec f{788.0, 2.8};
    EXPECT_NEAR(bandwidth_hz(f), 1.352e12, 0.001e12);
    const double tau = coherence_time(f);
    EXPECT_NEAR(tau, 326.0, 1.0);
    EXPECT_NEAR(tau / kOracleTau788_2p8, 1.0, 1e-3);
}

TEST(CoherenceTime, InverseBandwidthAndWavelengthSquared) {
    const double base = coherence_time({788.0, 2.8});
    EXPECT_NEAR(coherence_time({788.0, 5.6}), base / 2.0, 1e-9);
    EXPECT_NEAR(coherence_time({1576.0, 2.8}), base * 4.0, 1e-9);
    EXPECT_NEAR(coherence_time({788.0, 5.6}) / kOracleTau788_5p6, 1.0, 1e-3);
    EXPECT_NEAR(coherence_time({1576.0, 2.8}) / kOracleTau1576_2p8, 1.0, 1e-3);
}

TEST(CoherenceTime, TimeBandwidthProduct) {
    for (double bw : {0.5, 1.0, 2.8, 10.0}) {
        const FilterSpec f{800.0, bw};
        const double tbp = coherence_time(f) * 1e-15 * bandwidth_hz(f);
        EXPECT_NEAR(tbp / 0.441, 1.0, 1e-3);
    }
}

TEST(CoherenceTime, OracleAgreesLive) {
    const double oracle_fs = oracle::filtered_wavepacket_fwhm(788e-9, 2.8e-9) * 1e15;
    EXPECT_NEAR(oracle_fs, kOracleTau788_2p8, 1e-3);
}

TEST(FilterSpec, Validation) {
    EXPECT_THROW(coherence_time({788.0, -1.0}), ValidationError);
    EXPECT_THROW(coherence_time({0.0, 2.8}), ValidationError);
    EXPECT_THROW(coherence_time({788.0, 100.0}), ValidationError);
}

TEST(ModeOverlap, PerfectLimit) {
    const auto r = mode_overlap(photon(326.0), photon(326.0));
    EXPECT_NEAR(r.overlap, 1.0, 1e-9);
    EXPECT_NEAR(mode_overlap(photon(326.0, 0.0, 1e-6), photon(326.0, 0.0, 1e-6)).overlap, 1.0, 1e-9);
}

TEST(ModeOverlap, LargeDelayKillsOverlap) {
    EXPECT_LT(mode_overlap(photon(326.0), photon(326.0, 1e4)).overlap, 1e-12);
}

TEST(ModeOverlap, NominalRegime) {
    const double tau = 326.0;
    const auto r = mode_overlap(photon(tau, 0.0, 60.0), photon(tau, 2.0, 70.0));
    const double eps = 1.0 - r.overlap / r.pump;
    EXPECT_GT(eps, 0.0);
    EXPECT_LT(eps, 1e-4);
    EXPECT_NEAR(r.pump, 1.0 / std::sqrt(1.0 + 2.0 * (70.0 / tau) * (70.0 / tau)), 1e-15);
    // Quadrature for the timing factor.
    EXPECT_NEAR(r.timing, oracle::gaussian_overlap_quadrature(tau, tau, 2.0), 1e-12);
}

TEST(ModeOverlap, ClosedFormMatchesQuadratureOverDelayGrid) {
    for (double tau : {100.0, 326.0}) {
        for (int i = 0; i <= 30; ++i) {
            const double dt = 0.1 * i * tau;
            const double closed = timing_overlap(tau, tau, dt);
            const double quad = oracle::gaussian_overlap_quadrature(tau, tau, dt);
            EXPECT_NEAR(closed / quad, 1.0, 1e-6) << "tau=" << tau << " dt=" << dt;
        }
    }
    // Unequal widths too.
    for (double dt : {0.0, 50.0, 200.0, 600.0}) {
        EXPECT_NEAR(timing_overlap(300.0, 350.0, dt) / oracle::gaussian_overlap_quadrature(300.0, 350.0, dt),
                    1.0, 1e-6);
    }
}

TEST(ModeOverlap, SymmetricAndMonotone) {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const WavepacketParams a = photon(50.0 + 500.0 * rng.uniform(), 100.0 * rng.normal(),
                                          100.0 * rng.uniform());
        const WavepacketParams b = photon(50.0 + 500.0 * rng.uniform(), 100.0 * rng.normal(),
                                          100.0 * rng.uniform());
        const double ab = mode_overlap(a, b).overlap;
        EXPECT_DOUBLE_EQ(ab, mode_overlap(b, a).overlap);
        EXPECT_GE(ab, 0.0);
        EXPECT_LE(ab, 1.0);
    }
    double previous = 2.0;
    for (int i = 0; i <= 100; ++i) {
        const double v = mode_overlap(photon(326.0), photon(326.0, -10.0 * i)).overlap;
        EXPECT_LE(v, previous);
        previous = v;
    }
}

TEST(ModeOverlap, CustomModelIsPluggable) {
    struct Always : OverlapModel {
        OverlapResult overlap(const WavepacketParams &, const WavepacketParams &) const override {
            return {0.5, 0.5, 1.0};
        }
    };
    EXPECT_EQ(mode_overlap(photon(1.0), photon(1.0), Always{}).overlap, 0.5);
}

TEST(ModeOverlap, Validation) {
    EXPECT_THROW(mode_overlap(photon(0.0), photon(1.0)), ValidationError);
    EXPECT_THROW(mode_overlap(photon(1.0, 0.0, -1.0), photon(1.0)), ValidationError);
}

TEST(SampleJitter, ZeroRms) {
    Rng rng(1);
    EXPECT_EQ(sample_jitter(0.0, rng), 0.0);
    EXPECT_THROW(sample_jitter(-1.0, rng), ValidationError);
}

TEST(SampleJitter, SampleRmsConverges) {
    Rng rng(123);
    double sum_sq = 0.0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) {
        const double x = sample_jitter(2.0, rng);
        sum_sq += x * x;
    }
    EXPECT_NEAR(std::sqrt(sum_sq / n), 2.0, 0.01);
}

TEST(SampleJitter, DeterministicPerSeed) {
    Rng a(77), b(77);
    for (int i = 0; i < 1000; ++i) {
        EXPECT_EQ(sample_jitter(2.0, a), sample_jitter(2.0, b));
    }
}

TEST(JitterAveragedOverlap, MatchesGaussianAverage) {
    // <exp(-alpha x^2)> over x ~ N(0, s^2) = 1/sqrt(1 + 2 alpha s^2).
    const double tau = 326.0;
    const double rms = 150.0;
    const double alpha = 2.0 * std::numbers::ln2 / (tau * tau);
    Rng rng(3);
    const auto r = jitter_averaged_overlap(photon(tau), photon(tau), rms, 200000, rng);
    EXPECT_NEAR(r.timing, 1.0 / std::sqrt(1.0 + 2.0 * alpha * rms * rms), 2e-3);
}
