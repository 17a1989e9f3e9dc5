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

// Entanglement swapping between two independent pair sources: photons (1,2)
// from source 1, (3,4) from source 2, photons 2 and 3 meeting on a 50:50
// beam splitter whose cross-port coincidence heralds photons 1 and 4.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "synswap/errors.hpp"
#include "synswap/polarization.hpp"

namespace synswap::swapping {

using polarization::DensityMatrix;
using polarization::Matrix;

// Qubit positions in the four-photon register.
inline constexpr int kPhoton1 = 0;
inline constexpr int kPhoton2 = 1;
inline constexpr int kPhoton3 = 2;
inline constexpr int kPhoton4 = 3;

/// Werner visibilities of the two pair sources.
struct SourceSpec {
    double visibility1 = 0.9;
    double visibility2 = 0.9;

    bool operator==(const SourceSpec &) const = default;

    void validate() const {
        if (!(visibility1 >= 0.0 && visibility1 <= 1.0)) {
            throw ValidationError("source visibility1 outside [0, 1]");
        }
        if (!(visibility2 >= 0.0 && visibility2 <= 1.0)) {
            throw ValidationError("source visibility2 outside [0, 1]");
        }
    }
};

/// Beam-splitter Bell measurement, characterized by the mode overlap of the
/// two interfering photons.
struct BsmSpec {
    double overlap = 1.0;

    void validate() const {
        if (!(overlap >= 0.0 && overlap <= 1.0)) {
            throw ValidationError("BSM overlap " + std::to_string(overlap) + " outside [0, 1]");
        }
    }
};

struct SwapOutcome {
    double coincidence_prob = 0.0;
    DensityMatrix rho_14;
    double visibility_45 = 0.0;
    double singlet_fidelity = 0.0;
};

/// werner(v1) on photons (1,2) tensor werner(v2) on photons (3,4).
inline DensityMatrix four_photon_state(const SourceSpec &src) {
    src.validate();
    return polarization::tensor(polarization::werner(src.visibility1),
                                polarization::werner(src.visibility2));
}

/// Probability operator on (photon 2, photon 3) for a click in each output
/// port of the beam splitter. With overlap I the antisymmetric polarization
/// part exits in different ports with probability (1 + I)/2, the symmetric
/// part with probability (1 - I)/2:
///   Pi = (1 - I)/2 (1 - |Psi-><Psi-|) + (1 + I)/2 |Psi-><Psi-|.
inline Matrix bsm_coincidence_effect(const BsmSpec &b) {
    b.validate();
    const Matrix anti = polarization::singlet().projector();
    const Matrix sym = Matrix::Identity(4, 4) - anti;
    return 0.5 * (1.0 - b.overlap) * sym + 0.5 * (1.0 + b.overlap) * anti;
}

/// Heralds on a BSM coincidence and returns the state of photons 1 and 4.
/// Throws NullOutcomeError if the coincidence cannot happen.
inline SwapOutcome swap(const SourceSpec &src, const BsmSpec &b) {
    const DensityMatrix state = four_photon_state(src);
    const auto heralded =
        polarization::measure_project(state, bsm_coincidence_effect(b), {kPhoton2, kPhoton3});
    DensityMatrix rho_14 = polarization::partial_trace(heralded.state, {kPhoton1, kPhoton4});
    const double visibility = -polarization::correlation_E(rho_14, 45.0, 45.0);
    const double fidelity = polarization::fidelity_to_pure(rho_14, polarization::singlet());
    return {heralded.probability, std::move(rho_14), visibility, fidelity};
}

struct CoincidenceCurve {
    std::vector<double> theta4_deg;
    std::vector<double> parallel;      // photon 1 transmitted, photon 4 transmitted
    std::vector<double> perpendicular; // photon 1 reflected, photon 4 transmitted
};

/// Inclusive grid start, start + step, ... up to stop.
inline std::vector<double> angle_grid(double start_deg, double stop_deg, double step_deg) {
    if (!(step_deg > 0.0) || !(stop_deg >= start_deg)) {
        throw ValidationError("angle grid needs step > 0 and stop >= start");
    }
    const auto n = static_cast<std::size_t>(std::floor((stop_deg - start_deg) / step_deg + 1e-9)) + 1;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) {
        grid[i] = start_deg + static_cast<double>(i) * step_deg;
    }
    return grid;
}

/// Heralded two-photon coincidence probabilities while the photon-4
/// polarizer sweeps `theta4_grid` and photon 1 is analyzed at
/// `photon1_angle_deg` (both PBS ports).
inline CoincidenceCurve coincidence_curve(const DensityMatrix &rho_14, double photon1_angle_deg,
                                          const std::vector<double> &theta4_grid) {
    if (rho_14.n_qubits() != 2) {
        throw ValidationError("coincidence_curve needs the two-photon state of photons 1 and 4");
    }
    if (theta4_grid.empty()) {
        throw ValidationError("coincidence_curve needs a non-empty angle grid");
    }
    using polarization::Outcome;
    using polarization::PolarizerSetting;
    const PolarizerSetting par{photon1_angle_deg, Outcome::Transmit};
    const PolarizerSetting perp{photon1_angle_deg, Outcome::Reflect};
    CoincidenceCurve out;
    out.theta4_deg = theta4_grid;
    for (double theta4 : theta4_grid) {
        const PolarizerSetting pol4{theta4, Outcome::Transmit};
        out.parallel.push_back(polarization::joint_probability(rho_14, par, pol4));
        out.perpendicular.push_back(polarization::joint_probability(rho_14, perp, pol4));
    }
    return out;
}

/// y = offset + amplitude cos 2(theta - phase), amplitude >= 0,
/// phase in (-90, 90] degrees.
struct SinusoidFit {
    double offset = 0.0;
    double amplitude = 0.0;
    double phase_deg = 0.0;
};

struct VisibilityFit {
    double visibility = 0.0;
    double phase_deg = 0.0;
    double offset = 0.0;
    double amplitude = 0.0;
};

namespace detail {

inline void check_fit_grid(const std::vector<double> &theta) {
    if (theta.size() < 6) {
        throw ValidationError("sinusoid fit needs at least 6 angles");
    }
    const auto [lo, hi] = std::minmax_element(theta.begin(), theta.end());
    if (*hi - *lo < 180.0 - 1e-9) {
        throw ValidationError("sinusoid fit needs the angles to span at least 180 degrees");
    }
}

inline SinusoidFit to_sinusoid(double offset, double c, double s) {
    SinusoidFit f;
    f.offset = offset;
    f.amplitude = std::hypot(c, s);
    f.phase_deg = 0.5 * std::atan2(s, c) * 180.0 / std::numbers::pi;
    if (f.phase_deg <= -90.0) {
        f.phase_deg += 180.0;
    }
    return f;
}

} // namespace detail

/// Least-squares fit of a single curve.
inline SinusoidFit fit_sinusoid(const std::vector<double> &theta_deg, const std::vector<double> &y) {
    detail::check_fit_grid(theta_deg);
    if (y.size() != theta_deg.size()) {
        throw ValidationError("sinusoid fit: data and grid sizes differ");
    }
    const auto n = static_cast<Eigen::Index>(y.size());
    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = 2.0 * polarization::deg_to_rad(theta_deg[static_cast<std::size_t>(i)]);
        design(i, 0) = 1.0;
        design(i, 1) = std::cos(t);
        design(i, 2) = std::sin(t);
        rhs[i] = y[static_cast<std::size_t>(i)];
    }
    const Eigen::Vector3d p = design.colPivHouseholderQr().solve(rhs);
    return detail::to_sinusoid(p[0], p[1], p[2]);
}

/// Joint fit of the two complementary curves: parallel = a + b cos 2(theta -
/// phase), perpendicular = a - b cos 2(theta - phase). Visibility = b / a.
/// Works on probabilities or raw counts.
inline VisibilityFit fit_visibility(const std::vector<double> &theta_deg,
                                    const std::vector<double> &parallel,
                                    const std::vector<double> &perpendicular) {
    detail::check_fit_grid(theta_deg);
    if (parallel.size() != theta_deg.size() || perpendicular.size() != theta_deg.size()) {
        throw ValidationError("visibility fit: data and grid sizes differ");
    }
    const auto n = static_cast<Eigen::Index>(theta_deg.size());
    Eigen::MatrixXd design(2 * n, 3);
    Eigen::VectorXd rhs(2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double t = 2.0 * polarization::deg_to_rad(theta_deg[k]);
        design.row(i) << 1.0, std::cos(t), std::sin(t);
        design.row(n + i) << 1.0, -std::cos(t), -std::sin(t);
        rhs[i] = parallel[k];
        rhs[n + i] = perpendicular[k];
    }
    const Eigen::Vector3d p = design.colPivHouseholderQr().solve(rhs);
    if (!(p[0] > 0.0)) {
        throw RuntimeError("degenerate visibility fit: offset " + std::to_string(p[0]) + " <= 0");
    }
    const SinusoidFit s = detail::to_sinusoid(p[0], p[1], p[2]);
    return {s.amplitude / s.offset, s.phase_deg, s.offset, s.amplitude};
}

} // namespace synswap::swapping
