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

#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

#include "synswap/errors.hpp"
#include "synswap/random.hpp"

namespace synswap::wavepacket {

inline constexpr double kSpeedOfLight = 299'792'458.0; // m/s
/// Intensity-FWHM time-bandwidth product of a transform-limited Gaussian, 2 ln2 / pi.
inline constexpr double kGaussianTimeBandwidth = 2.0 * std::numbers::ln2 / std::numbers::pi;
/// FWHM / sigma of a Gaussian, 2 sqrt(2 ln2).
inline const double kFwhmPerSigma = 2.0 * std::sqrt(2.0 * std::numbers::ln2);

/// Interference filter in front of a detector.
struct FilterSpec {
    double center_wavelength_nm = 788.0;
    double fwhm_bandwidth_nm = 2.8;

    bool operator==(const FilterSpec &) const = default;

    void validate() const {
        if (!(center_wavelength_nm > 0.0)) {
            throw ValidationError("filter center_wavelength_nm must be positive");
        }
        if (!(fwhm_bandwidth_nm > 0.0)) {
            throw ValidationError("filter fwhm_bandwidth_nm must be positive");
        }
        if (!(fwhm_bandwidth_nm / center_wavelength_nm < 0.1)) {
            throw ValidationError("filter fwhm_bandwidth_nm must be narrow (< 10% of center)");
        }
    }
};

enum class PulseKind { Gaussian, Sech2 };

inline std::string to_string(PulseKind k) { return k == PulseKind::Gaussian ? "gaussian" : "sech2"; }

/// Intensity envelope of a pump pulse.
struct PulseShape {
    PulseKind kind = PulseKind::Gaussian;
    double fwhm_fs = 60.0;

    bool operator==(const PulseShape &) const = default;

    void validate() const {
        if (!(fwhm_fs > 0.0) || !std::isfinite(fwhm_fs)) {
            throw ValidationError("pulse fwhm_fs must be positive");
        }
    }
};

/// Temporal description of one interfering photon.
struct WavepacketParams {
    double coherence_time_fs = 0.0; // intensity FWHM of the filtered wavepacket
    double arrival_offset_fs = 0.0;
    double pump_fwhm_fs = 0.0;

    void validate() const {
        if (!(coherence_time_fs > 0.0) || !std::isfinite(coherence_time_fs)) {
            throw ValidationError("coherence_time_fs must be positive");
        }
        if (!std::isfinite(arrival_offset_fs)) {
            throw ValidationError("arrival_offset_fs must be finite");
        }
        if (!(pump_fwhm_fs >= 0.0) || !std::isfinite(pump_fwhm_fs)) {
            throw ValidationError("pump_fwhm_fs must be non-negative");
        }
    }
};

/// Indistinguishability of the two photons meeting at the beam splitter,
/// with the factors that make it up.
struct OverlapResult {
    double overlap = 1.0; // timing * pump, in [0, 1]
    double timing = 1.0;
    double pump = 1.0;
};

/// Optical bandwidth in Hz of a filter given in wavelength units.
inline double bandwidth_hz(const FilterSpec &filter) {
    filter.validate();
    const double lambda = filter.center_wavelength_nm * 1e-9;
    return kSpeedOfLight * filter.fwhm_bandwidth_nm * 1e-9 / (lambda * lambda);
}

/// Coherence time (intensity FWHM, fs) of a photon behind a Gaussian filter.
inline double coherence_time(const FilterSpec &filter) {
    return kGaussianTimeBandwidth / bandwidth_hz(filter) * 1e15;
}

/// |<psi_a|psi_b>|^2 for real Gaussian amplitudes with intensity FWHMs
/// tau_a, tau_b displaced by dt.
inline double timing_overlap(double tau_a_fs, double tau_b_fs, double dt_fs) {
    const double sum_sq = tau_a_fs * tau_a_fs + tau_b_fs * tau_b_fs;
    const double width_match = 2.0 * tau_a_fs * tau_b_fs / sum_sq;
    return width_match * std::exp(-4.0 * std::numbers::ln2 * dt_fs * dt_fs / sum_sq);
}

/// Visibility loss from timing information carried by a pump of duration
/// tau_pump relative to the mean coherence time.
inline double pump_overlap(double tau_pump_fs, double mean_coherence_fs) {
    const double ratio = tau_pump_fs / mean_coherence_fs;
    return 1.0 / std::sqrt(1.0 + 2.0 * ratio * ratio);
}

/// Strategy for turning two wavepacket descriptions into an overlap.
class OverlapModel {
  public:
    virtual ~OverlapModel() = default;
    virtual OverlapResult overlap(const WavepacketParams &a, const WavepacketParams &b) const = 0;
};

/// Separable single-mode Gaussian model: overlap = pump factor * timing factor.
class GaussianOverlapModel final : public OverlapModel {
  public:
    OverlapResult overlap(const WavepacketParams &a, const WavepacketParams &b) const override {
        a.validate();
        b.validate();
        OverlapResult r;
        r.timing = timing_overlap(a.coherence_time_fs, b.coherence_time_fs,
                                  a.arrival_offset_fs - b.arrival_offset_fs);
        const double mean_tau = 0.5 * (a.coherence_time_fs + b.coherence_time_fs);
        r.pump = pump_overlap(std::max(a.pump_fwhm_fs, b.pump_fwhm_fs), mean_tau);
        r.overlap = std::clamp(r.timing * r.pump, 0.0, 1.0);
        return r;
    }
};

inline OverlapResult mode_overlap(const WavepacketParams &a, const WavepacketParams &b,
                                  const OverlapModel &model = GaussianOverlapModel{}) {
    return model.overlap(a, b);
}

/// Zero-mean Gaussian timing offset with the given RMS.
inline double sample_jitter(double rms_fs, Rng &rng) {
    if (!(rms_fs >= 0.0)) {
        throw ValidationError("jitter rms must be non-negative");
    }
    return rms_fs == 0.0 ? 0.0 : rms_fs * rng.normal();
}

/// Monte-Carlo mean of the overlap when photon b's arrival carries extra
/// Gaussian jitter of the given RMS.
inline OverlapResult jitter_averaged_overlap(const WavepacketParams &a, WavepacketParams b,
                                             double jitter_rms_fs, int samples, Rng &rng,
                                             const OverlapModel &model = GaussianOverlapModel{}) {
    if (samples < 1) {
        throw ValidationError("jitter_averaged_overlap needs at least one sample");
    }
    const double base = b.arrival_offset_fs;
    OverlapResult sum{0.0, 0.0, 0.0};
    for (int i = 0; i < samples; ++i) {
        b.arrival_offset_fs = base + sample_jitter(jitter_rms_fs, rng);
        const OverlapResult r = model.overlap(a, b);
        sum.overlap += r.overlap;
        sum.timing += r.timing;
        sum.pump += r.pump;
    }
    const double n = samples;
    return {sum.overlap / n, sum.timing / n, sum.pump / n};
}

} // namespace synswap::wavepacket
