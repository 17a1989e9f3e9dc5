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

// End-to-end runner: laser sync -> photon overlap -> swapping -> CHSH, and
// the files a run leaves behind.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "synswap/chsh.hpp"
#include "synswap/errors.hpp"
#include "synswap/laser_sync.hpp"
#include "synswap/scenario.hpp"
#include "synswap/swapping.hpp"
#include "synswap/version.hpp"
#include "synswap/wavepacket.hpp"

namespace synswap::experiment {

enum class Stage { Sync, HomOverlap, Swap, Chsh, Full };

inline std::string to_string(Stage s) {
    switch (s) {
    case Stage::Sync:
        return "sync";
    case Stage::HomOverlap:
        return "hom-overlap";
    case Stage::Swap:
        return "swap";
    case Stage::Chsh:
        return "chsh";
    case Stage::Full:
        return "full";
    }
    return "?";
}

inline std::optional<Stage> parse_stage(std::string_view name) {
    for (Stage s : {Stage::Sync, Stage::HomOverlap, Stage::Swap, Stage::Chsh, Stage::Full}) {
        if (to_string(s) == name) {
            return s;
        }
    }
    return std::nullopt;
}

struct SyncSummary {
    double locking_range_fs = 0.0;
    double beat_frequency_hz = 0.0;
    laser::JitterEstimate jitter;
    laser::CrossCorrelation xcorr_ideal;    // zero jitter
    laser::CrossCorrelation xcorr_jittered; // with the simulated jitter
    laser::JitterBound inferred;            // recovered from xcorr_jittered
};

struct OverlapSummary {
    double coherence_time_fs = 0.0;
    double jitter_fs = 0.0;
    std::string jitter_source; // "simulated", "override"
    wavepacket::OverlapResult model;
    double overlap = 0.0; // value handed to the BSM
    bool overridden = false;
};

struct SwapSummary {
    swapping::SwapOutcome outcome;
    swapping::CoincidenceCurve curve;
    swapping::VisibilityFit curve_fit;
};

struct ChshSummary {
    double analytic_s = 0.0;
    chsh::ChshResult result;
};

struct RunRecord {
    Scenario scenario;
    Stage stage = Stage::Full;
    std::string tool_version = kVersion;
    std::optional<SyncSummary> sync;
    std::optional<OverlapSummary> overlap;
    std::optional<SwapSummary> swap;
    std::optional<ChshSummary> chsh;
};

namespace detail {

inline std::uint64_t require_seed(const Scenario &s, const char *stage) {
    if (!s.seed) {
        throw ValidationError(std::string("seed: required for the stochastic '") + stage +
                              "' stage (pass --seed)");
    }
    return *s.seed;
}

// Stage seeds, derived from the root seed.
inline constexpr std::uint64_t kSyncStream = 1;
inline constexpr std::uint64_t kChshStream = 2;

inline SyncSummary run_sync(const Scenario &s) {
    const std::uint64_t seed = require_seed(s, "sync");
    SyncSummary out;
    out.locking_range_fs = laser::locking_range(s.kerr);
    out.beat_frequency_hz = s.cavities.beat_frequency_hz();
    out.jitter = laser::steady_state_jitter(s.cavities, s.kerr, s.sync_noise_rms_fs, s.sync_rounds,
                                            child_seed(seed, kSyncStream));
    out.xcorr_ideal = laser::cross_correlate(s.pump1, s.pump2, 0.0);
    out.xcorr_jittered = laser::cross_correlate(s.pump1, s.pump2, out.jitter.rms_fs);
    out.inferred = laser::infer_jitter_bound(out.xcorr_jittered.fwhm_fs, s.pump1, s.pump2);
    return out;
}

inline OverlapSummary run_overlap(const Scenario &s, const std::optional<SyncSummary> &sync) {
    OverlapSummary out;
    out.coherence_time_fs = wavepacket::coherence_time(s.filter);
    if (s.jitter_override_fs) {
        out.jitter_fs = *s.jitter_override_fs;
        out.jitter_source = "override";
    } else {
        out.jitter_fs = sync ? sync->jitter.rms_fs : run_sync(s).jitter.rms_fs;
        out.jitter_source = "simulated";
    }
    // Photon 2 rides pump 1, photon 3 rides pump 2, displaced by the jitter.
    const wavepacket::WavepacketParams photon2{out.coherence_time_fs, 0.0, s.pump1.fwhm_fs};
    const wavepacket::WavepacketParams photon3{out.coherence_time_fs, out.jitter_fs, s.pump2.fwhm_fs};
    out.model = wavepacket::mode_overlap(photon2, photon3);
    out.overridden = s.overlap_override.has_value();
    out.overlap = out.overridden ? *s.overlap_override : out.model.overlap;
    return out;
}

inline SwapSummary run_swap(const Scenario &s, double overlap) {
    swapping::SwapOutcome outcome = swapping::swap(s.sources, swapping::BsmSpec{overlap});
    swapping::CoincidenceCurve curve =
        swapping::coincidence_curve(outcome.rho_14, s.photon1_basis_deg, s.curve_grid());
    const swapping::VisibilityFit fit =
        swapping::fit_visibility(curve.theta4_deg, curve.parallel, curve.perpendicular);
    return SwapSummary{std::move(outcome), std::move(curve), fit};
}

} // namespace detail

/// Runs the stages that `stage` needs. A seed is demanded only when a
/// random draw actually happens.
inline RunRecord run_pipeline(const Scenario &scenario, Stage stage = Stage::Full) {
    scenario.validate();
    RunRecord r;
    r.scenario = scenario;
    r.stage = stage;

    const bool wants_sync = stage == Stage::Sync || stage == Stage::Full;
    const bool wants_overlap = stage != Stage::Sync;
    const bool wants_swap = stage == Stage::Swap || stage == Stage::Chsh || stage == Stage::Full;
    const bool wants_chsh = stage == Stage::Chsh || stage == Stage::Full;

    if (wants_sync) {
        r.sync = detail::run_sync(scenario);
    }
    if (wants_overlap) {
        if (scenario.overlap_override && stage != Stage::HomOverlap && stage != Stage::Full) {
            // The swap only needs the number; skip the timing model.
            OverlapSummary o;
            o.coherence_time_fs = wavepacket::coherence_time(scenario.filter);
            o.jitter_source = "unused";
            o.overridden = true;
            o.overlap = *scenario.overlap_override;
            o.model = {o.overlap, o.overlap, 1.0};
            r.overlap = o;
        } else {
            r.overlap = detail::run_overlap(scenario, r.sync);
        }
    }
    if (wants_swap) {
        r.swap = detail::run_swap(scenario, r.overlap->overlap);
    }
    if (wants_chsh) {
        const std::uint64_t seed = detail::require_seed(scenario, to_string(stage).c_str());
        ChshSummary c;
        c.analytic_s = chsh::chsh_analytic(r.swap->outcome.rho_14, scenario.chsh);
        c.result = chsh::run_chsh_experiment(r.swap->outcome.rho_14, scenario.chsh,
                                             scenario.events_per_setting,
                                             child_seed(seed, detail::kChshStream),
                                             scenario.accidental_rate);
        r.chsh = c;
    }
    return r;
}

/// The run record as "key = value" text, scenario echoed under "scenario.".
inline std::string format_run_record(const RunRecord &r) {
    std::ostringstream o;
    auto put = [&](const std::string &key, const std::string &value) {
        o << key << " = " << value << "\n";
    };
    auto num = [&](const std::string &key, double v) { put(key, format_real(v)); };

    o << "# synswap run record\n";
    put("tool_version", r.tool_version);
    put("stage", to_string(r.stage));
    put("seed", r.scenario.seed ? std::to_string(*r.scenario.seed) : "none");
    o << format_scenario(r.scenario, "scenario.");

    if (r.sync) {
        const SyncSummary &s = *r.sync;
        num("sync.locking_range_fs", s.locking_range_fs);
        num("sync.free_running_beat_hz", s.beat_frequency_hz);
        num("sync.fixed_point_fs", s.jitter.fixed_point_fs);
        num("sync.pull_slope", s.jitter.slope);
        num("sync.steady_state_jitter_fs", s.jitter.rms_fs);
        num("sync.predicted_jitter_fs", s.jitter.predicted_rms_fs);
        num("sync.mean_offset_fs", s.jitter.mean_fs);
        put("sync.burn_in_rounds", std::to_string(s.jitter.burn_in));
        num("xcorr.fwhm_ideal_fs", s.xcorr_ideal.fwhm_fs);
        num("xcorr.fwhm_jittered_fs", s.xcorr_jittered.fwhm_fs);
        num("xcorr.inferred_jitter_fs", s.inferred.sigma_fs);
        put("xcorr.below_resolution", s.inferred.below_resolution ? "true" : "false");
        num("xcorr.resolution_fs", s.inferred.resolution_fs);
    }
    if (r.overlap) {
        const OverlapSummary &v = *r.overlap;
        num("overlap.coherence_time_fs", v.coherence_time_fs);
        num("overlap.jitter_fs", v.jitter_fs);
        put("overlap.jitter_source", v.jitter_source);
        num("overlap.timing", v.model.timing);
        num("overlap.pump", v.model.pump);
        num("overlap.model", v.model.overlap);
        put("overlap.overridden", v.overridden ? "true" : "false");
        num("overlap.used", v.overlap);
    }
    if (r.swap) {
        const SwapSummary &w = *r.swap;
        num("swap.coincidence_prob", w.outcome.coincidence_prob);
        num("swap.visibility_45", w.outcome.visibility_45);
        num("swap.singlet_fidelity", w.outcome.singlet_fidelity);
        for (Eigen::Index i = 0; i < 4; ++i) {
            for (Eigen::Index j = 0; j < 4; ++j) {
                const auto z = w.outcome.rho_14(i, j);
                const std::string key = "swap.rho_14." + std::to_string(i) + std::to_string(j);
                put(key, format_real(z.real()) + " " + format_real(z.imag()));
            }
        }
        num("curve.fit_visibility", w.curve_fit.visibility);
        num("curve.fit_phase_deg", w.curve_fit.phase_deg);
        num("curve.fit_offset", w.curve_fit.offset);
    }
    if (r.chsh) {
        const ChshSummary &c = *r.chsh;
        num("chsh.analytic_s", c.analytic_s);
        num("chsh.s", c.result.s_value);
        num("chsh.s_sigma", c.result.s_sigma);
        num("chsh.sigma_violation", c.result.sigma_violation);
        const char *slots[4] = {"e11", "e12", "e21", "e22"};
        for (std::size_t i = 0; i < 4; ++i) {
            num(std::string("chsh.") + slots[i], c.result.estimates[i].e_value);
            num(std::string("chsh.") + slots[i] + "_sigma", c.result.estimates[i].sigma);
        }
    }
    return o.str();
}

/// Human summary at three decimals.
inline std::string format_summary(const RunRecord &r) {
    std::ostringstream o;
    char buf[160];
    auto line = [&](const char *label, double v, const char *unit = "") {
        std::snprintf(buf, sizeof buf, "  %-34s %10.3f %s\n", label, v, unit);
        o << buf;
    };
    o << "synswap " << r.tool_version << "  stage=" << to_string(r.stage) << "  seed="
      << (r.scenario.seed ? std::to_string(*r.scenario.seed) : "none") << "\n";
    if (r.sync) {
        line("locking range", r.sync->locking_range_fs, "fs");
        line("steady-state timing jitter (rms)", r.sync->jitter.rms_fs, "fs");
        line("cross-correlation FWHM, no jitter", r.sync->xcorr_ideal.fwhm_fs, "fs");
        line("cross-correlation FWHM, jittered", r.sync->xcorr_jittered.fwhm_fs, "fs");
    }
    if (r.overlap) {
        line("coherence time", r.overlap->coherence_time_fs, "fs");
        line("mode overlap I", r.overlap->overlap);
    }
    if (r.swap) {
        line("BSM coincidence probability", r.swap->outcome.coincidence_prob);
        line("swapped visibility (45 deg)", r.swap->outcome.visibility_45);
        line("singlet fidelity", r.swap->outcome.singlet_fidelity);
    }
    if (r.chsh) {
        line("S (analytic)", r.chsh->analytic_s);
        line("S (sampled)", r.chsh->result.s_value);
        line("sigma(S)", r.chsh->result.s_sigma);
        line("violation", r.chsh->result.sigma_violation, "sigma");
    }
    return o.str();
}

namespace detail {

inline void write_file(const std::filesystem::path &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw RuntimeError("cannot write '" + path.string() + "'");
    }
    out << content;
    out.close();
    if (!out) {
        throw RuntimeError("error while writing '" + path.string() + "'");
    }
}

} // namespace detail

inline constexpr const char *kRunRecordFile = "run_record.txt";
inline constexpr const char *kCurveFile = "coincidence_curve.csv";
inline constexpr const char *kSyncTraceFile = "sync_trace.csv";
inline constexpr const char *kCrossCorrelationFile = "cross_correlation.csv";
inline constexpr const char *kChshCountsFile = "chsh_counts.csv";

/// Writes the run record and whichever CSVs the run produced into `dir`
/// (created if needed). Returns the written paths.
inline std::vector<std::filesystem::path> emit_outputs(const RunRecord &r,
                                                       const std::filesystem::path &dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw RuntimeError("cannot create output directory '" + dir.string() + "': " + ec.message());
    }
    std::vector<std::filesystem::path> written;
    auto emit = [&](const char *name, const std::string &content) {
        detail::write_file(dir / name, content);
        written.push_back(dir / name);
    };

    emit(kRunRecordFile, format_run_record(r));

    if (r.swap) {
        std::string csv = "theta4_deg,p_parallel,p_perp\n";
        const auto &c = r.swap->curve;
        for (std::size_t i = 0; i < c.theta4_deg.size(); ++i) {
            csv += format_real(c.theta4_deg[i]) + "," + format_real(c.parallel[i]) + "," +
                   format_real(c.perpendicular[i]) + "\n";
        }
        emit(kCurveFile, csv);
    }
    if (r.sync) {
        std::string csv = "round,dt_fs\n";
        const auto &t = r.sync->jitter.trace;
        for (std::size_t i = 0; i < t.size(); ++i) {
            csv += std::to_string(i) + "," + format_real(t[i]) + "\n";
        }
        emit(kSyncTraceFile, csv);

        std::string xc = "delay_fs,signal\n";
        const auto &x = r.sync->xcorr_ideal;
        for (std::size_t i = 0; i < x.delays_fs.size(); ++i) {
            xc += format_real(x.delays_fs[i]) + "," + format_real(x.signal[i]) + "\n";
        }
        emit(kCrossCorrelationFile, xc);
    }
    if (r.chsh) {
        std::string csv = "theta_a,theta_b,n_pp,n_pr,n_rp,n_rr\n";
        const auto pairs = r.scenario.chsh.pairs();
        for (std::size_t i = 0; i < 4; ++i) {
            const auto &n = r.chsh->result.estimates[i].counts;
            csv += format_real(pairs[i].theta_a) + "," + format_real(pairs[i].theta_b) + "," +
                   std::to_string(n.n_pp) + "," + std::to_string(n.n_pr) + "," +
                   std::to_string(n.n_rp) + "," + std::to_string(n.n_rr) + "\n";
        }
        emit(kChshCountsFile, csv);
    }
    return written;
}

} // namespace synswap::experiment
