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

// Scenario files: flat "key = value" text, one entry per line, '#' starts a
// comment. Units are part of the key names. Every key is optional; missing
// keys keep the defaults of the "paper" preset. Unknown or repeated keys
// are rejected.
//
//   preset = paper            # must come first if present
//   seed = 42
//   filter_fwhm_nm = 2.8
//   pump2_shape = sech2

#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "synswap/chsh.hpp"
#include "synswap/errors.hpp"
#include "synswap/laser_sync.hpp"
#include "synswap/swapping.hpp"
#include "synswap/wavepacket.hpp"

namespace synswap::experiment {

struct Scenario {
    std::string preset = "paper";
    std::optional<std::uint64_t> seed;
    std::string output_dir = "out";

    swapping::SourceSpec sources{0.9, 0.9};
    wavepacket::FilterSpec filter{788.0, 2.8};
    wavepacket::PulseShape pump1{wavepacket::PulseKind::Gaussian, 60.0};
    wavepacket::PulseShape pump2{wavepacket::PulseKind::Gaussian, 70.0};

    laser::CavityPair cavities{81.0, 0.5};
    laser::KerrCoupling kerr{20.0, 40.0};
    double sync_noise_rms_fs = 1.0;
    std::int64_t sync_rounds = 100000;

    std::optional<double> jitter_override_fs;
    std::optional<double> overlap_override;

    double photon1_basis_deg = 45.0;
    double curve_theta4_start_deg = 0.0;
    double curve_theta4_stop_deg = 180.0;
    double curve_theta4_step_deg = 10.0;

    chsh::ChshSettings chsh;
    std::uint64_t events_per_setting = 300;
    double accidental_rate = 0.0;

    bool operator==(const Scenario &) const = default;

    std::vector<double> curve_grid() const {
        return swapping::angle_grid(curve_theta4_start_deg, curve_theta4_stop_deg,
                                    curve_theta4_step_deg);
    }

    /// Checks every module invariant; messages name the offending key.
    void validate() const;
};

} // namespace synswap::experiment

namespace synswap::experiment {

/// Syntax error in a scenario file, with 1-based line and column.
class ScenarioParseError : public ValidationError {
  public:
    ScenarioParseError(const std::string &source, int line, int column, const std::string &message)
        : ValidationError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " +
                          message),
          line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

  private:
    int line_;
    int column_;
};

/// 17 significant digits; round-trips every double.
inline std::string format_real(double x) {
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    if (std::isnan(x)) {
        return "nan";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

struct BadValue {
    std::string message;
};

inline double parse_real(std::string_view v) {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(x)) {
        throw BadValue{"expected a finite number, got '" + std::string(v) + "'"};
    }
    return x;
}

template <class Int> Int parse_integer(std::string_view v) {
    Int x{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw BadValue{"expected an integer, got '" + std::string(v) + "'"};
    }
    return x;
}

inline wavepacket::PulseKind parse_pulse_kind(std::string_view v) {
    if (v == "gaussian") {
        return wavepacket::PulseKind::Gaussian;
    }
    if (v == "sech2") {
        return wavepacket::PulseKind::Sech2;
    }
    throw BadValue{"expected 'gaussian' or 'sech2', got '" + std::string(v) + "'"};
}

struct Field {
    std::string_view key;
    std::function<void(Scenario &, std::string_view)> set;
    std::function<std::optional<std::string>(const Scenario &)> get; // nullopt: unset
};

template <class Access> Field real(std::string_view key, Access acc) {
    return {key, [acc](Scenario &s, std::string_view v) { acc(s) = parse_real(v); },
            [acc](const Scenario &s) { return std::optional<std::string>(format_real(acc(s))); }};
}

template <class Access> Field optional_real(std::string_view key, Access acc) {
    return {key, [acc](Scenario &s, std::string_view v) { acc(s) = parse_real(v); },
            [acc](const Scenario &s) -> std::optional<std::string> {
                if (!acc(s)) {
                    return std::nullopt;
                }
                return format_real(*acc(s));
            }};
}

template <class Int, class Access> Field integer(std::string_view key, Access acc) {
    return {key, [acc](Scenario &s, std::string_view v) { acc(s) = parse_integer<Int>(v); },
            [acc](const Scenario &s) { return std::optional<std::string>(std::to_string(acc(s))); }};
}

template <class Access> Field pulse_kind(std::string_view key, Access acc) {
    return {key, [acc](Scenario &s, std::string_view v) { acc(s) = parse_pulse_kind(v); },
            [acc](const Scenario &s) { return std::optional<std::string>(wavepacket::to_string(acc(s))); }};
}

// clang-format off
inline const std::vector<Field> &fields() {
    static const std::vector<Field> table = {
        {"preset",
         [](Scenario &s, std::string_view v) {
             if (v != "paper") {
                 throw BadValue{"unknown preset '" + std::string(v) + "' (known: paper)"};
             }
             s = Scenario{};
         },
         [](const Scenario &s) { return std::optional<std::string>(s.preset); }},
        {"seed",
         [](Scenario &s, std::string_view v) { s.seed = parse_integer<std::uint64_t>(v); },
         [](const Scenario &s) -> std::optional<std::string> {
             if (!s.seed) return std::nullopt;
             return std::to_string(*s.seed);
         }},
        {"output_dir",
         [](Scenario &s, std::string_view v) { s.output_dir = std::string(v); },
         [](const Scenario &s) { return std::optional<std::string>(s.output_dir); }},
        real("source1_visibility", [](auto &s) -> auto & { return s.sources.visibility1; }),
        real("source2_visibility", [](auto &s) -> auto & { return s.sources.visibility2; }),
        real("filter_center_nm", [](auto &s) -> auto & { return s.filter.center_wavelength_nm; }),
        real("filter_fwhm_nm", [](auto &s) -> auto & { return s.filter.fwhm_bandwidth_nm; }),
        pulse_kind("pump1_shape", [](auto &s) -> auto & { return s.pump1.kind; }),
        real("pump1_fwhm_fs", [](auto &s) -> auto & { return s.pump1.fwhm_fs; }),
        pulse_kind("pump2_shape", [](auto &s) -> auto & { return s.pump2.kind; }),
        real("pump2_fwhm_fs", [](auto &s) -> auto & { return s.pump2.fwhm_fs; }),
        real("repetition_rate_mhz", [](auto &s) -> auto & { return s.cavities.repetition_rate_mhz; }),
        real("detuning_fs", [](auto &s) -> auto & { return s.cavities.detuning_fs; }),
        real("kerr_strength_fs", [](auto &s) -> auto & { return s.kerr.strength_fs; }),
        real("kerr_width_fs", [](auto &s) -> auto & { return s.kerr.width_fs; }),
        real("sync_noise_rms_fs", [](auto &s) -> auto & { return s.sync_noise_rms_fs; }),
        integer<std::int64_t>("sync_rounds", [](auto &s) -> auto & { return s.sync_rounds; }),
        optional_real("jitter_override_fs", [](auto &s) -> auto & { return s.jitter_override_fs; }),
        optional_real("overlap_override", [](auto &s) -> auto & { return s.overlap_override; }),
        real("photon1_basis_deg", [](auto &s) -> auto & { return s.photon1_basis_deg; }),
        real("curve_theta4_start_deg", [](auto &s) -> auto & { return s.curve_theta4_start_deg; }),
        real("curve_theta4_stop_deg", [](auto &s) -> auto & { return s.curve_theta4_stop_deg; }),
        real("curve_theta4_step_deg", [](auto &s) -> auto & { return s.curve_theta4_step_deg; }),
        real("theta1_deg", [](auto &s) -> auto & { return s.chsh.theta1; }),
        real("theta1p_deg", [](auto &s) -> auto & { return s.chsh.theta1p; }),
        real("theta4_deg", [](auto &s) -> auto & { return s.chsh.theta4; }),
        real("theta4p_deg", [](auto &s) -> auto & { return s.chsh.theta4p; }),
        integer<std::uint64_t>("events_per_setting", [](auto &s) -> auto & { return s.events_per_setting; }),
        real("accidental_rate", [](auto &s) -> auto & { return s.accidental_rate; }),
    };
    return table;
}
// clang-format on

inline const Field *find_field(std::string_view key) {
    for (const Field &f : fields()) {
        if (f.key == key) {
            return &f;
        }
    }
    return nullptr;
}

inline void require(bool ok, const char *key, const std::string &what) {
    if (!ok) {
        throw ValidationError(std::string(key) + ": " + what);
    }
}

} // namespace detail

inline void Scenario::validate() const {
    using detail::require;
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    require(unit(sources.visibility1), "source1_visibility", "must lie in [0, 1]");
    require(unit(sources.visibility2), "source2_visibility", "must lie in [0, 1]");
    require(filter.center_wavelength_nm > 0.0, "filter_center_nm", "must be positive");
    require(filter.fwhm_bandwidth_nm > 0.0, "filter_fwhm_nm", "must be positive");
    require(filter.fwhm_bandwidth_nm / filter.center_wavelength_nm < 0.1, "filter_fwhm_nm",
            "must be below 10% of filter_center_nm");
    require(pump1.fwhm_fs > 0.0, "pump1_fwhm_fs", "must be positive");
    require(pump2.fwhm_fs > 0.0, "pump2_fwhm_fs", "must be positive");
    require(cavities.repetition_rate_mhz > 0.0, "repetition_rate_mhz", "must be positive");
    require(kerr.strength_fs >= 0.0, "kerr_strength_fs", "must be non-negative");
    require(kerr.width_fs > 0.0, "kerr_width_fs", "must be positive");
    require(sync_noise_rms_fs >= 0.0, "sync_noise_rms_fs", "must be non-negative");
    require(sync_rounds >= 10, "sync_rounds", "must be at least 10");
    require(!jitter_override_fs || *jitter_override_fs >= 0.0, "jitter_override_fs",
            "must be non-negative");
    require(!overlap_override || unit(*overlap_override), "overlap_override", "must lie in [0, 1]");
    require(curve_theta4_step_deg > 0.0, "curve_theta4_step_deg", "must be positive");
    require(curve_theta4_stop_deg - curve_theta4_start_deg >= 180.0 - 1e-9, "curve_theta4_stop_deg",
            "curve must span at least 180 degrees");
    require(curve_grid().size() >= 6, "curve_theta4_step_deg", "curve needs at least 6 points");
    require(curve_grid().size() <= 100000, "curve_theta4_step_deg", "curve has too many points");
    require(events_per_setting >= 10, "events_per_setting", "must be at least 10");
    require(unit(accidental_rate), "accidental_rate", "must lie in [0, 1]");
}

/// Parses scenario text and validates the result. Does not require a seed.
inline Scenario parse_scenario(std::string_view text, const std::string &source = "<scenario>") {
    Scenario s;
    std::vector<std::string> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(pos, end - pos);
        const std::size_t line_start = pos;
        pos = end + 1;
        ++line_no;
        (void)line_start;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string_view::npos) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ScenarioParseError(source, line_no, static_cast<int>(first) + 1,
                                     "expected 'key = value'");
        }
        std::string_view key = line.substr(first, eq - first);
        key = key.substr(0, key.find_last_not_of(" \t") + 1);
        if (key.empty()) {
            throw ScenarioParseError(source, line_no, static_cast<int>(first) + 1, "missing key");
        }
        for (std::size_t i = 0; i < key.size(); ++i) {
            const char c = key[i];
            if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_')) {
                throw ScenarioParseError(source, line_no, static_cast<int>(first + i) + 1,
                                         "invalid character in key");
            }
        }
        const auto vstart = line.find_first_not_of(" \t", eq + 1);
        if (vstart == std::string_view::npos) {
            throw ScenarioParseError(source, line_no, static_cast<int>(eq) + 2,
                                     "missing value for '" + std::string(key) + "'");
        }
        std::string_view value = line.substr(vstart);
        value = value.substr(0, value.find_last_not_of(" \t") + 1);

        const detail::Field *field = detail::find_field(key);
        if (field == nullptr) {
            throw ScenarioParseError(source, line_no, static_cast<int>(first) + 1,
                                     "unknown key '" + std::string(key) + "'");
        }
        for (const auto &k : seen) {
            if (k == key) {
                throw ScenarioParseError(source, line_no, static_cast<int>(first) + 1,
                                         "repeated key '" + std::string(key) + "'");
            }
        }
        if (key == "preset" && !seen.empty()) {
            throw ScenarioParseError(source, line_no, static_cast<int>(first) + 1,
                                     "'preset' must be the first key");
        }
        seen.emplace_back(key);
        try {
            field->set(s, value);
        } catch (const detail::BadValue &bad) {
            throw ScenarioParseError(source, line_no, static_cast<int>(vstart) + 1,
                                     std::string(key) + ": " + bad.message);
        }
    }
    s.validate();
    return s;
}

inline Scenario load_scenario(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open scenario file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

/// Scenario as scenario-file text; every set key, one per line.
inline std::string format_scenario(const Scenario &s, std::string_view key_prefix = "") {
    std::string out;
    for (const detail::Field &f : detail::fields()) {
        if (const auto v = f.get(s)) {
            out += std::string(key_prefix) + std::string(f.key) + " = " + *v + "\n";
        }
    }
    return out;
}

} // namespace synswap::experiment
