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

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "synswap/errors.hpp"
#include "synswap/polarization.hpp"
#include "synswap/random.hpp"

namespace synswap::chsh {

using polarization::DensityMatrix;

/// Analyzer angles (degrees) for photon 1 (theta1, theta1p) and photon 4
/// (theta4, theta4p). Defaults are the maximal-violation settings for the
/// singlet under the sign pattern used here.
struct ChshSettings {
    double theta1 = -22.5;
    double theta1p = -67.5;
    double theta4 = 0.0;
    double theta4p = 45.0;

    bool operator==(const ChshSettings &) const = default;

    void validate() const {
        if (!std::isfinite(theta1) || !std::isfinite(theta1p) || !std::isfinite(theta4) ||
            !std::isfinite(theta4p)) {
            throw ValidationError("CHSH angles must be finite");
        }
    }

    struct Pair {
        double theta_a;
        double theta_b;
    };

    /// Slot order: (theta1, theta4), (theta1, theta4p), (theta1p, theta4), (theta1p, theta4p).
    std::array<Pair, 4> pairs() const {
        return {{{theta1, theta4}, {theta1, theta4p}, {theta1p, theta4}, {theta1p, theta4p}}};
    }
};

/// Fourfold coincidences split by analyzer outcome (p = transmit, r = reflect).
struct CountTable {
    std::uint64_t n_pp = 0;
    std::uint64_t n_pr = 0;
    std::uint64_t n_rp = 0;
    std::uint64_t n_rr = 0;

    std::uint64_t total() const { return n_pp + n_pr + n_rp + n_rr; }
};

struct CorrelationEstimate {
    double e_value = 0.0;
    double sigma = 0.0;
    CountTable counts;
};

struct ChshResult {
    double s_value = 0.0;
    double s_sigma = 0.0;
    double sigma_violation = 0.0; // (S - 2) / s_sigma; +-inf when s_sigma = 0
    std::array<CorrelationEstimate, 4> estimates{};
};

/// S = |E11 - E12 - E21 - E22|, slots as in ChshSettings::pairs().
inline double combine(double e11, double e12, double e21, double e22) {
    return std::abs(e11 - e12 - e21 - e22);
}

inline double chsh_analytic(const DensityMatrix &rho, const ChshSettings &s) {
    s.validate();
    const auto p = s.pairs();
    std::array<double, 4> e{};
    for (std::size_t i = 0; i < 4; ++i) {
        e[i] = polarization::correlation_E(rho, p[i].theta_a, p[i].theta_b);
    }
    return combine(e[0], e[1], e[2], e[3]);
}

/// Multinomial draw of `n_events` coincidences over the four outcomes of
/// analyzers at theta_a (photon 1) and theta_b (photon 4). A fraction
/// `accidental_rate` of events is replaced by uniformly random outcomes.
inline CountTable sample_counts(const DensityMatrix &rho, double theta_a_deg, double theta_b_deg,
                                std::uint64_t n_events, std::uint64_t seed,
                                double accidental_rate = 0.0) {
    if (n_events == 0) {
        throw ValidationError("sample_counts needs n_events > 0");
    }
    if (!(accidental_rate >= 0.0 && accidental_rate <= 1.0)) {
        throw ValidationError("accidental_rate outside [0, 1]");
    }
    auto p = polarization::outcome_probabilities(rho, theta_a_deg, theta_b_deg);
    double total = 0.0;
    for (double &x : p) {
        x = (1.0 - accidental_rate) * x + 0.25 * accidental_rate;
        total += x;
    }
    const double c0 = p[0] / total;
    const double c1 = c0 + p[1] / total;
    const double c2 = c1 + p[2] / total;

    Rng rng(seed);
    CountTable t;
    for (std::uint64_t i = 0; i < n_events; ++i) {
        const double u = rng.uniform();
        if (u < c0) {
            ++t.n_pp;
        } else if (u < c1) {
            ++t.n_pr;
        } else if (u < c2) {
            ++t.n_rp;
        } else {
            ++t.n_rr;
        }
    }
    return t;
}

/// E = (n_pp + n_rr - n_pr - n_rp) / N, sigma = sqrt((1 - E^2) / N).
inline CorrelationEstimate estimate_E(const CountTable &c) {
    const std::uint64_t n = c.total();
    if (n == 0) {
        throw ValidationError("estimate_E: empty count table");
    }
    const double nd = static_cast<double>(n);
    const double e = (static_cast<double>(c.n_pp) + static_cast<double>(c.n_rr) -
                      static_cast<double>(c.n_pr) - static_cast<double>(c.n_rp)) /
                     nd;
    return {e, std::sqrt(std::max(0.0, 1.0 - e * e) / nd), c};
}

/// Combines four correlation estimates (slot order of ChshSettings::pairs());
/// the errors add in quadrature.
inline ChshResult chsh_estimate(const CorrelationEstimate &e11, const CorrelationEstimate &e12,
                                const CorrelationEstimate &e21, const CorrelationEstimate &e22) {
    ChshResult r;
    r.estimates = {e11, e12, e21, e22};
    r.s_value = combine(e11.e_value, e12.e_value, e21.e_value, e22.e_value);
    r.s_sigma = std::sqrt(e11.sigma * e11.sigma + e12.sigma * e12.sigma + e21.sigma * e21.sigma +
                          e22.sigma * e22.sigma);
    const double excess = r.s_value - 2.0;
    if (r.s_sigma > 0.0) {
        r.sigma_violation = excess / r.s_sigma;
    } else if (excess != 0.0) {
        r.sigma_violation = std::copysign(std::numeric_limits<double>::infinity(), excess);
    }
    return r;
}

/// One simulated CHSH run: settings pair i draws from child_seed(seed, i).
inline ChshResult run_chsh_experiment(const DensityMatrix &rho, const ChshSettings &s,
                                      std::uint64_t events_per_setting, std::uint64_t seed,
                                      double accidental_rate = 0.0) {
    if (rho.n_qubits() != 2) {
        throw ValidationError("CHSH experiment needs a two-photon state");
    }
    if (events_per_setting < 10) {
        throw ValidationError("events_per_setting must be at least 10");
    }
    s.validate();
    const auto pairs = s.pairs();
    std::array<CorrelationEstimate, 4> e{};
    for (std::size_t i = 0; i < 4; ++i) {
        e[i] = estimate_E(sample_counts(rho, pairs[i].theta_a, pairs[i].theta_b, events_per_setting,
                                        child_seed(seed, i), accidental_rate));
    }
    return chsh_estimate(e[0], e[1], e[2], e[3]);
}

/// `runs` independent experiments, run r seeded with child_seed(root_seed, r).
/// Work is split over `shards` threads; the result is indexed by run and
/// does not depend on the shard count.
inline std::vector<ChshResult> run_chsh_ensemble(const DensityMatrix &rho, const ChshSettings &s,
                                                 std::uint64_t events_per_setting,
                                                 std::uint64_t root_seed, std::size_t runs,
                                                 std::size_t shards = 1,
                                                 double accidental_rate = 0.0) {
    if (shards == 0) {
        throw ValidationError("shard count must be positive");
    }
    // Validate up front; worker threads must not throw.
    if (rho.n_qubits() != 2) {
        throw ValidationError("CHSH experiment needs a two-photon state");
    }
    if (events_per_setting < 10) {
        throw ValidationError("events_per_setting must be at least 10");
    }
    if (!(accidental_rate >= 0.0 && accidental_rate <= 1.0)) {
        throw ValidationError("accidental_rate outside [0, 1]");
    }
    s.validate();
    std::vector<ChshResult> out(runs);
    auto work = [&](std::size_t shard) {
        for (std::size_t r = shard; r < runs; r += shards) {
            out[r] = run_chsh_experiment(rho, s, events_per_setting, child_seed(root_seed, r),
                                         accidental_rate);
        }
    };
    if (shards == 1) {
        work(0);
        return out;
    }
    std::vector<std::thread> threads;
    threads.reserve(shards);
    for (std::size_t k = 0; k < shards; ++k) {
        threads.emplace_back(work, k);
    }
    for (auto &t : threads) {
        t.join();
    }
    return out;
}

} // namespace synswap::chsh
