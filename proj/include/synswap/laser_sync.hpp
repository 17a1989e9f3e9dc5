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

// Passive Kerr-coupled synchronization of two mode-locked lasers, reduced to
// a discrete-time map on the inter-pulse timing offset dt (one step per
// cavity round trip), plus the sum-frequency cross-correlator used to bound
// the residual jitter.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "synswap/errors.hpp"
#include "synswap/random.hpp"
#include "synswap/wavepacket.hpp"

namespace synswap::laser {

using wavepacket::PulseKind;
using wavepacket::PulseShape;

struct CavityPair {
    double repetition_rate_mhz = 81.0;
    double detuning_fs = 0.0; // free-running round-trip difference T1 - T2

    bool operator==(const CavityPair &) const = default;

    void validate() const {
        if (!(repetition_rate_mhz > 0.0) || !std::isfinite(repetition_rate_mhz)) {
            throw ValidationError("repetition_rate_mhz must be positive");
        }
        if (!std::isfinite(detuning_fs)) {
            throw ValidationError("detuning_fs must be finite");
        }
    }

    double round_trip_s() const { return 1e-6 / repetition_rate_mhz; }

    /// |f1 - f2| of the free-running lasers, ~ f^2 |T1 - T2|.
    double beat_frequency_hz() const {
        const double f = repetition_rate_mhz * 1e6;
        return f * f * std::abs(detuning_fs) * 1e-15;
    }
};

/// Cross-phase-modulation pull: strength is the peak timing correction per
/// round trip (up to the e^-1/2 shape factor), width the overlap scale.
struct KerrCoupling {
    double strength_fs = 20.0;
    double width_fs = 40.0;

    bool operator==(const KerrCoupling &) const = default;

    void validate() const {
        if (!(strength_fs >= 0.0) || !std::isfinite(strength_fs)) {
            throw ValidationError("kerr strength_fs must be non-negative");
        }
        if (!(width_fs > 0.0) || !std::isfinite(width_fs)) {
            throw ValidationError("kerr width_fs must be positive");
        }
    }

    /// Slope of the pull at dt = 0.
    double gain() const { return strength_fs / width_fs; }
};

struct SyncState {
    double dt_fs = 0.0;
    std::int64_t round_index = 0;
};

/// dt after every round trip; element i belongs to round i.
using SyncTrace = std::vector<double>;

/// f(dt) = k (dt/w) exp(-dt^2 / 2w^2). Odd and restoring: a leading pulse
/// (dt > 0) is held back, a lagging one pushed forward.
inline double pull_function(double dt_fs, const KerrCoupling &k) {
    const double u = dt_fs / k.width_fs;
    return k.strength_fs * u * std::exp(-0.5 * u * u);
}

/// d f / d dt.
inline double pull_slope(double dt_fs, const KerrCoupling &k) {
    const double u = dt_fs / k.width_fs;
    return k.gain() * (1.0 - u * u) * std::exp(-0.5 * u * u);
}

/// One round trip: dt' = dt + detuning - f(dt) + noise.
inline SyncState step(const SyncState &s, const CavityPair &cavities, const KerrCoupling &k,
                      double noise_rms_fs, Rng &rng) {
    const double noise = noise_rms_fs > 0.0 ? noise_rms_fs * rng.normal() : 0.0;
    return {s.dt_fs + cavities.detuning_fs - pull_function(s.dt_fs, k) + noise, s.round_index + 1};
}

/// Largest |detuning| that still admits a fixed point: max f = k e^-1/2.
inline double locking_range(const KerrCoupling &k) {
    k.validate();
    return k.strength_fs * std::exp(-0.5);
}

struct FixedPoint {
    double dt_fs;
    double slope; // f'(dt*); the map contracts while 0 < slope < 2
};

/// Stable fixed point f(dt*) = detuning on the branch |dt*| < w.
/// Throws NotLockedError when none exists or it is not attracting.
inline FixedPoint locked_fixed_point(const CavityPair &cavities, const KerrCoupling &k) {
    cavities.validate();
    k.validate();
    const double d = cavities.detuning_fs;
    const double range = locking_range(k);
    if (std::abs(d) > range) {
        throw NotLockedError("detuning " + std::to_string(d) + " fs exceeds locking range " +
                             std::to_string(range) + " fs");
    }
    if (k.strength_fs == 0.0) {
        throw NotLockedError("no Kerr coupling");
    }
    // f is monotone increasing on [-w, w].
    double lo = d >= 0.0 ? 0.0 : -k.width_fs;
    double hi = d >= 0.0 ? k.width_fs : 0.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * k.width_fs; ++i) {
        const double mid = 0.5 * (lo + hi);
        (pull_function(mid, k) < d ? lo : hi) = mid;
    }
    const double x = d == 0.0 ? 0.0 : 0.5 * (lo + hi);
    const double slope = pull_slope(x, k);
    if (!(slope > 0.0 && slope < 2.0)) {
        throw NotLockedError("fixed point not attracting (|1 - f'| = " +
                             std::to_string(std::abs(1.0 - slope)) + ")");
    }
    return {x, slope};
}

/// Iterates the map for `rounds` steps; the returned trace starts with the
/// initial state.
inline SyncTrace simulate(SyncState start, const CavityPair &cavities, const KerrCoupling &k,
                          double noise_rms_fs, std::int64_t rounds, Rng &rng) {
    SyncTrace trace;
    trace.reserve(static_cast<std::size_t>(rounds) + 1);
    trace.push_back(start.dt_fs);
    for (std::int64_t i = 0; i < rounds; ++i) {
        start = step(start, cavities, k, noise_rms_fs, rng);
        trace.push_back(start.dt_fs);
    }
    return trace;
}

struct JitterEstimate {
    double rms_fs = 0.0;           // sample standard deviation of dt after burn-in
    double mean_fs = 0.0;          // sample mean of dt after burn-in
    double predicted_rms_fs = 0.0; // linearized AR(1) value
    double slope = 0.0;            // f' at the fixed point
    double fixed_point_fs = 0.0;
    std::int64_t burn_in = 0;
    SyncTrace trace;
};

/// Linearized stationary RMS of dt' = (1 - g) dt + noise.
inline double ar1_rms(double gain, double noise_rms_fs) {
    const double a = 1.0 - gain;
    return noise_rms_fs / std::sqrt(1.0 - a * a);
}

/// Timing jitter of the locked lasers. Starts at the fixed point, discards
/// the first tenth of the rounds, and reports the spread of the rest.
/// Throws NotLockedError if no stable fixed point exists or noise kicks the
/// offset out of the capture region (10 w from the fixed point).
inline JitterEstimate steady_state_jitter(const CavityPair &cavities, const KerrCoupling &k,
                                          double noise_rms_fs, std::int64_t n_rounds,
                                          std::uint64_t seed) {
    if (!(noise_rms_fs >= 0.0)) {
        throw ValidationError("noise_rms_fs must be non-negative");
    }
    if (n_rounds < 10) {
        throw ValidationError("steady_state_jitter needs at least 10 rounds");
    }
    const FixedPoint fp = locked_fixed_point(cavities, k);

    JitterEstimate out;
    out.slope = fp.slope;
    out.fixed_point_fs = fp.dt_fs;
    out.predicted_rms_fs = ar1_rms(fp.slope, noise_rms_fs);
    out.burn_in = n_rounds / 10;

    Rng rng(seed);
    out.trace = simulate({fp.dt_fs, 0}, cavities, k, noise_rms_fs, n_rounds, rng);

    const double escape = 10.0 * k.width_fs;
    for (std::size_t i = 0; i < out.trace.size(); ++i) {
        if (!(std::abs(out.trace[i] - fp.dt_fs) < escape)) {
            throw NotLockedError("timing offset escaped the capture region at round " +
                                 std::to_string(i));
        }
    }

    const auto first = out.trace.begin() + out.burn_in + 1;
    const double n = static_cast<double>(out.trace.end() - first);
    double mean = 0.0;
    for (auto it = first; it != out.trace.end(); ++it) {
        mean += *it;
    }
    mean /= n;
    double var = 0.0;
    for (auto it = first; it != out.trace.end(); ++it) {
        var += (*it - mean) * (*it - mean);
    }
    out.mean_fs = mean;
    out.rms_fs = std::sqrt(var / n);
    return out;
}

/// Normalized intensity envelope, peak 1 at t = 0.
inline double intensity(const PulseShape &p, double t_fs) {
    switch (p.kind) {
    case PulseKind::Gaussian: {
        const double x = t_fs / p.fwhm_fs;
        return std::exp(-4.0 * std::numbers::ln2 * x * x);
    }
    case PulseKind::Sech2: {
        // FWHM = 2 ln(1 + sqrt2) T
        const double T = p.fwhm_fs / (2.0 * std::log(1.0 + std::numbers::sqrt2));
        const double c = 1.0 / std::cosh(t_fs / T);
        return c * c;
    }
    }
    return 0.0;
}

struct CrossCorrelation {
    std::vector<double> delays_fs;
    std::vector<double> signal; // max normalized to 1
    double fwhm_fs = 0.0;
};

/// Full width at half maximum of a sampled peak, interpolating linearly
/// between the samples that straddle half of the maximum.
inline double fwhm(const std::vector<double> &x, const std::vector<double> &y) {
    if (x.size() != y.size() || x.size() < 3) {
        throw ValidationError("fwhm needs matching grids of at least three points");
    }
    const auto peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    const double half = 0.5 * y[peak];
    std::size_t l = peak;
    while (l > 0 && y[l] > half) {
        --l;
    }
    std::size_t r = peak;
    while (r + 1 < y.size() && y[r] > half) {
        ++r;
    }
    if (y[l] > half || y[r] > half) {
        throw RuntimeError("peak does not fall to half maximum inside the grid");
    }
    auto cross = [&](std::size_t below, std::size_t above) {
        return x[below] + (half - y[below]) * (x[above] - x[below]) / (y[above] - y[below]);
    };
    return cross(r, r - 1) - cross(l, l + 1);
}

inline constexpr double kDelayStepFs = 0.1;
inline constexpr std::size_t kMaxDelayPoints = 40001;

/// SFG cross-correlation S(tau) ~ <int I1(t) I2(t - tau - delta) dt>_delta,
/// averaged over Gaussian relative-timing jitter delta. Delay grid: 0.1 fs
/// spacing over +-5 combined widths, coarsened only if that would exceed
/// kMaxDelayPoints.
inline CrossCorrelation cross_correlate(const PulseShape &p1, const PulseShape &p2,
                                        double jitter_rms_fs) {
    p1.validate();
    p2.validate();
    if (!(jitter_rms_fs >= 0.0) || !std::isfinite(jitter_rms_fs)) {
        throw ValidationError("jitter_rms_fs must be non-negative");
    }
    const double jitter_fwhm = wavepacket::kFwhmPerSigma * jitter_rms_fs;
    const double combined = std::sqrt(p1.fwhm_fs * p1.fwhm_fs + p2.fwhm_fs * p2.fwhm_fs +
                                      jitter_fwhm * jitter_fwhm);
    const double half_span = 5.0 * combined;
    double dstep = kDelayStepFs;
    if (2.0 * half_span / dstep + 1.0 > static_cast<double>(kMaxDelayPoints)) {
        dstep = 2.0 * half_span / static_cast<double>(kMaxDelayPoints - 1);
    }
    const auto half_points = static_cast<std::int64_t>(std::ceil(half_span / dstep));

    // Pulse-only correlation on a grid extended by the jitter kernel reach.
    const auto kernel_half =
        jitter_rms_fs > 0.0 ? static_cast<std::int64_t>(std::ceil(5.0 * jitter_rms_fs / dstep)) : 0;
    const std::int64_t ext = half_points + kernel_half;

    // Both integrands live on the same integer grid, so t - tau stays on it.
    const auto t_half = static_cast<std::int64_t>(std::ceil(6.0 * p1.fwhm_fs / dstep));
    std::vector<double> i1(static_cast<std::size_t>(2 * t_half + 1));
    for (std::int64_t j = -t_half; j <= t_half; ++j) {
        i1[static_cast<std::size_t>(j + t_half)] = intensity(p1, j * dstep);
    }
    const std::int64_t reach = t_half + ext;
    std::vector<double> i2(static_cast<std::size_t>(2 * reach + 1));
    for (std::int64_t j = -reach; j <= reach; ++j) {
        i2[static_cast<std::size_t>(j + reach)] = intensity(p2, j * dstep);
    }

    std::vector<double> pulse_only(static_cast<std::size_t>(2 * ext + 1));
    for (std::int64_t m = -ext; m <= ext; ++m) {
        double acc = 0.0;
        for (std::int64_t j = -t_half; j <= t_half; ++j) {
            acc += i1[static_cast<std::size_t>(j + t_half)] * i2[static_cast<std::size_t>(j - m + reach)];
        }
        pulse_only[static_cast<std::size_t>(m + ext)] = acc;
    }

    CrossCorrelation out;
    out.delays_fs.resize(static_cast<std::size_t>(2 * half_points + 1));
    out.signal.resize(out.delays_fs.size());
    if (kernel_half == 0) {
        for (std::int64_t m = -half_points; m <= half_points; ++m) {
            out.delays_fs[static_cast<std::size_t>(m + half_points)] = m * dstep;
            out.signal[static_cast<std::size_t>(m + half_points)] =
                pulse_only[static_cast<std::size_t>(m + ext)];
        }
    } else {
        std::vector<double> kernel(static_cast<std::size_t>(2 * kernel_half + 1));
        double ksum = 0.0;
        for (std::int64_t j = -kernel_half; j <= kernel_half; ++j) {
            const double u = j * dstep / jitter_rms_fs;
            kernel[static_cast<std::size_t>(j + kernel_half)] = std::exp(-0.5 * u * u);
            ksum += kernel[static_cast<std::size_t>(j + kernel_half)];
        }
        for (double &w : kernel) {
            w /= ksum;
        }
        for (std::int64_t m = -half_points; m <= half_points; ++m) {
            double acc = 0.0;
            for (std::int64_t j = -kernel_half; j <= kernel_half; ++j) {
                acc += kernel[static_cast<std::size_t>(j + kernel_half)] *
                       pulse_only[static_cast<std::size_t>(m - j + ext)];
            }
            out.delays_fs[static_cast<std::size_t>(m + half_points)] = m * dstep;
            out.signal[static_cast<std::size_t>(m + half_points)] = acc;
        }
    }
    const double peak = *std::max_element(out.signal.begin(), out.signal.end());
    for (double &s : out.signal) {
        s /= peak;
    }
    out.fwhm_fs = fwhm(out.delays_fs, out.signal);
    return out;
}

struct JitterBound {
    double sigma_fs = 0.0;          // inferred RMS jitter
    bool below_resolution = false;  // measured width narrower than the pulses allow
    double resolution_fs = 0.0;     // jitter-free cross-correlation FWHM
};

/// Removes the pulse-duration contribution from a measured cross-correlation
/// width: sigma = sqrt(max(0, measured^2 - pulses^2)) / 2.355.
inline JitterBound infer_jitter_bound(double measured_fwhm_fs, const PulseShape &p1,
                                      const PulseShape &p2) {
    if (!(measured_fwhm_fs > 0.0) || !std::isfinite(measured_fwhm_fs)) {
        throw ValidationError("measured cross-correlation FWHM must be positive");
    }
    p1.validate();
    p2.validate();
    JitterBound out;
    if (p1.kind == PulseKind::Gaussian && p2.kind == PulseKind::Gaussian) {
        out.resolution_fs = std::hypot(p1.fwhm_fs, p2.fwhm_fs);
    } else {
        out.resolution_fs = cross_correlate(p1, p2, 0.0).fwhm_fs;
    }
    const double excess = measured_fwhm_fs * measured_fwhm_fs - out.resolution_fs * out.resolution_fs;
    out.below_resolution = measured_fwhm_fs < out.resolution_fs;
    out.sigma_fs = std::sqrt(std::max(0.0, excess)) / wavepacket::kFwhmPerSigma;
    return out;
}

} // namespace synswap::laser
