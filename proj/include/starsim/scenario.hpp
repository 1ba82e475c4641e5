#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "starsim/constants.hpp"

namespace starsim {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// RF band of a payload front-end. The platform TTC link is tracked by its
/// own label ("TTC") in link configuration and is not a payload band.
enum class Band { Uhf, LS, X, Ka };

inline std::string band_label(Band b) {
    switch (b) {
        case Band::Uhf: return "UHF";
        case Band::LS: return "L/S";
        case Band::X: return "X";
        case Band::Ka: return "Ka";
    }
    return "?";
}

/// Accepts canonical labels plus common aliases ("s", "l/s", case-insensitive).
inline std::optional<Band> parse_band(std::string_view text) {
    std::string low(text);
    std::transform(low.begin(), low.end(), low.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (low == "uhf") return Band::Uhf;
    if (low == "l/s" || low == "s" || low == "ls") return Band::LS;
    if (low == "x") return Band::X;
    if (low == "ka") return Band::Ka;
    return std::nullopt;
}

/// Band label used in station capability sets for the laser terminal.
inline constexpr const char* optical_band_label = "optical";

struct PlatformSpec {
    std::string form_factor = "6U CubeSat";
    double payload_mass_limit_kg = 8.0;
    double payload_volume_limit_u = 4.0;
    double avg_power_min_w = 7.0;
    double avg_power_max_w = 20.0;
    double payload_peak_power_ceiling_w = 160.0;
    double supply_nominal_w = 45.0;  // continuous supply cap
    double supply_peak_w = 85.0;     // instantaneous supply cap
    double battery_capacity_wh = 42.0;
    std::uint64_t data_storage_bits = 1'600'000'000'000ull;  // 200 GB
    double ttc_downlink_rate_bps = 5e6;
    double duty_cycle_floor = 0.15;
    double lifetime_years = 3.0;
};

struct FreqRange {
    double low_hz = 0.0;
    double high_hz = 0.0;
    double center_hz() const { return 0.5 * (low_hz + high_hz); }
};

struct FrontEnd {
    std::string id;
    Band band = Band::Uhf;
    std::vector<FreqRange> ranges;
    // Range whose center frequency represents the space-to-ground link in
    // budget calculations (FE2 carries its uplink allocation first, so the
    // default is not always index 0).
    std::size_t link_range_index = 0;
    double max_gross_rate_bps = 0.0;
    double max_bandwidth_hz = 0.0;
    double antenna_gain_dbi = 0.0;
    std::string use_case;

    const FreqRange& link_range() const { return ranges.at(link_range_index); }
};

struct SdrUnit {
    std::string id;
    std::vector<std::string> slots;  // exactly two front-end ids
    double standby_power_w = 10.0;
    double active_power_w = 30.0;
};

struct OpticalTerminal {
    double standby_power_w = 4.0;
    double peak_power_w = 25.0;
    double downlink_wavelength_nm = 1530.0;
    double downlink_tx_power_w = 1.0;
    double downlink_max_rate_bps = 1e9;
    double uplink_wavelength_nm = 1560.0;
    double uplink_max_rate_bps = 100e6;
    double range_min_km = 500.0;
    double range_max_km = 1500.0;
    double pointing_requirement_3sigma_deg = 1.0;
    // Achieved platform pointing performance, compared against the
    // requirement as a per-scenario constant.
    double pointing_error_3sigma_deg = 0.5;
};

struct OrbitSpec {
    double altitude_km = 550.0;
    double inclination_deg = 97.6;
    double raan_deg = 0.0;
    double true_anomaly_deg = 0.0;
    double epoch_s = 0.0;  // simulation time at which the phase angles apply
};

struct GroundStation {
    std::string name;
    double latitude_deg = 0.0;
    double longitude_deg = 0.0;
    double altitude_m = 0.0;
    double min_elevation_deg = 0.0;
    std::set<std::string> supported_bands;  // band labels, incl. "optical"
};

struct ExperimentSpec {
    std::string id;
    int priority = 0;  // higher = more urgent
    std::set<std::string> required_frontends;
    bool requires_optical = false;
    double duration_s = 0.0;
    double extra_power_w = 0.0;  // beyond device active power
    double data_production_rate_bps = 0.0;
    double earliest_start_s = 0.0;
    double latest_end_s = 0.0;
};

struct GenerationModel {
    double sunlit_power_w = 14.0;
    bool eclipse_modeled = false;
    // Sun direction, fixed per scenario, unit vector in the inertial frame.
    double sun_direction[3] = {1.0, 0.0, 0.0};
};

struct SimParams {
    double duration_s = 11478.0;  // two orbits at the baseline altitude
    double time_step_s = 10.0;
    std::uint64_t seed = 1;
    // When set, schedules are additionally required to keep the per-orbit
    // payload duty cycle at or above platform.duty_cycle_floor.
    bool enforce_duty_floor = false;
};

struct Scenario {
    PlatformSpec platform;
    std::vector<SdrUnit> sdrs;
    std::vector<FrontEnd> frontends;
    OpticalTerminal optical;
    OrbitSpec orbit;
    std::vector<GroundStation> stations;
    std::vector<ExperimentSpec> experiments;
    GenerationModel generation;
    SimParams sim;

    const FrontEnd* find_frontend(const std::string& id) const {
        for (const auto& fe : frontends)
            if (fe.id == id) return &fe;
        return nullptr;
    }

    const SdrUnit* find_sdr(const std::string& id) const {
        for (const auto& sdr : sdrs)
            if (sdr.id == id) return &sdr;
        return nullptr;
    }

    const GroundStation* find_station(const std::string& name) const {
        for (const auto& st : stations)
            if (st.name == name) return &st;
        return nullptr;
    }

    const ExperimentSpec* find_experiment(const std::string& id) const {
        for (const auto& e : experiments)
            if (e.id == id) return &e;
        return nullptr;
    }

    /// SDR hosting the given front-end slot, or nullptr if unmapped.
    const SdrUnit* host_sdr(const std::string& frontend_id) const {
        for (const auto& sdr : sdrs)
            for (const auto& slot : sdr.slots)
                if (slot == frontend_id) return &sdr;
        return nullptr;
    }

    /// Front-end carrying the given band, or nullptr.
    const FrontEnd* frontend_for_band(Band b) const {
        for (const auto& fe : frontends)
            if (fe.band == b) return &fe;
        return nullptr;
    }
};

// ---------------------------------------------------------------------------
// Baseline scenario
// ---------------------------------------------------------------------------

/// The baseline 6GStarLab platform: dual Minerva SDRs with four front-ends,
/// a 1U laser terminal, a 550 km near-polar orbit and one RF plus one optical
/// ground station placed on the epoch ground track.
inline Scenario default_scenario() {
    Scenario s;

    s.sdrs = {
        {"Minerva-A", {"FE1", "FE2"}, 10.0, 30.0},
        {"Minerva-B", {"FE3", "FE4"}, 10.0, 30.0},
    };

    s.frontends = {
        {"FE1",
         Band::Uhf,
         {{433.00e6, 434.79e6}, {863.00e6, 870.00e6}, {903.00e6, 914.20e6}},
         0,
         50e3,
         0.125e6,
         3.0,
         "DtS IoT"},
        {"FE2",
         Band::LS,
         {{1980.00e6, 2025.00e6}, {2160.00e6, 2200.00e6}},
         1,  // 2160-2200 MHz is the space-to-ground allocation
         1.152e6,
         0.75e6,
         10.0,
         "DtS IoT NTN (n256)"},
        {"FE3", Band::X, {{10.45e9, 10.50e9}}, 0, 2.3e6, 1.5e6, 11.0, "Data backhauling"},
        {"FE4",
         Band::Ka,
         {{19.30e9, 20.10e9}, {29.10e9, 30.00e9}},
         0,
         4.6e6,
         3.0e6,
         11.0,
         "NTN (n511)"},
    };

    // Equatorial crossings of the first two ascending passes; the second
    // station is reached one orbit later after the ground track regresses.
    s.stations = {
        {"equator-rf", 0.0, 0.0, 0.0, 10.0, {"UHF", "L/S", "X", "Ka"}},
        {"equator-ogs", 0.0, -23.978, 0.0, 15.0, {optical_band_label}},
    };

    return s;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// One invariant breach. `path` points at the offending element
/// ("frontends[FE2].ranges[0]", "platform", ...).
struct Issue {
    std::string code;
    std::string path;
    std::string message;
};

namespace detail {

inline void add_issue(std::vector<Issue>& out, std::string code, std::string path,
                      std::string message) {
    out.push_back({std::move(code), std::move(path), std::move(message)});
}

} // namespace detail

/// Checks every type invariant and cross-reference of a scenario. Issues are
/// data, not failures; an empty result means the scenario is well-formed.
inline std::vector<Issue> validate_scenario(const Scenario& s) {
    using detail::add_issue;
    std::vector<Issue> issues;

    const auto& p = s.platform;
    if (!(p.supply_nominal_w <= p.supply_peak_w &&
          p.supply_peak_w <= p.payload_peak_power_ceiling_w))
        add_issue(issues, "supply-order", "platform",
                  "expected supply_nominal <= supply_peak <= peak power ceiling");
    if (!(p.duty_cycle_floor > 0.0 && p.duty_cycle_floor < 1.0))
        add_issue(issues, "duty-floor-range", "platform", "duty_cycle_floor must be in (0, 1)");
    if (!(p.battery_capacity_wh > 0.0))
        add_issue(issues, "battery-capacity", "platform", "battery capacity must be positive");
    if (p.data_storage_bits == 0)
        add_issue(issues, "storage-capacity", "platform", "data storage must be positive");

    std::set<std::string> frontend_ids;
    for (const auto& fe : s.frontends) {
        const std::string path = "frontends[" + fe.id + "]";
        if (!frontend_ids.insert(fe.id).second)
            add_issue(issues, "duplicate-id", path, "duplicate front-end id");
        if (fe.ranges.empty())
            add_issue(issues, "missing-range", path, "front-end defines no frequency range");
        for (std::size_t i = 0; i < fe.ranges.size(); ++i) {
            if (!(fe.ranges[i].low_hz < fe.ranges[i].high_hz))
                add_issue(issues, "range-order", path + ".ranges[" + std::to_string(i) + "]",
                          "range low must be below high");
            for (std::size_t j = i + 1; j < fe.ranges.size(); ++j) {
                if (fe.ranges[i].low_hz < fe.ranges[j].high_hz &&
                    fe.ranges[j].low_hz < fe.ranges[i].high_hz)
                    add_issue(issues, "range-overlap", path, "frequency ranges overlap");
            }
        }
        if (fe.link_range_index >= fe.ranges.size() && !fe.ranges.empty())
            add_issue(issues, "range-index", path, "link_range_index out of bounds");
        if (!(fe.max_gross_rate_bps > 0.0))
            add_issue(issues, "rate-nonpositive", path, "max gross rate must be positive");
    }

    std::set<std::string> sdr_ids;
    for (const auto& sdr : s.sdrs) {
        const std::string path = "sdrs[" + sdr.id + "]";
        if (!sdr_ids.insert(sdr.id).second)
            add_issue(issues, "duplicate-id", path, "duplicate SDR id");
        if (!(sdr.standby_power_w < sdr.active_power_w))
            add_issue(issues, "standby-exceeds-active", path,
                      "standby power must be below active power");
        if (sdr.slots.size() != 2)
            add_issue(issues, "slot-count", path, "an SDR carries exactly two front-end slots");
        std::set<std::string> seen;
        for (const auto& slot : sdr.slots) {
            if (!seen.insert(slot).second)
                add_issue(issues, "duplicate-slot", path, "slots must reference distinct front-ends");
            if (!frontend_ids.count(slot))
                add_issue(issues, "dangling-frontend", path,
                          "slot references unknown front-end " + slot);
        }
    }

    if (!(s.optical.range_min_km < s.optical.range_max_km))
        add_issue(issues, "optical-range-order", "optical", "range_min must be below range_max");
    if (!(s.optical.pointing_requirement_3sigma_deg > 0.0))
        add_issue(issues, "pointing-nonpositive", "optical",
                  "pointing requirement must be positive");
    if (s.optical.pointing_error_3sigma_deg < 0.0)
        add_issue(issues, "pointing-negative", "optical", "pointing error cannot be negative");

    if (!(s.orbit.altitude_km > 0.0))
        add_issue(issues, "orbit-altitude", "orbit", "altitude must be positive");
    for (double ang : {s.orbit.inclination_deg, s.orbit.raan_deg, s.orbit.true_anomaly_deg}) {
        if (!(ang >= 0.0 && ang < 360.0)) {
            add_issue(issues, "angle-not-normalized", "orbit",
                      "orbit angles must lie in [0, 360)");
            break;
        }
    }

    std::set<std::string> station_names;
    for (const auto& st : s.stations) {
        const std::string path = "stations[" + st.name + "]";
        if (!station_names.insert(st.name).second)
            add_issue(issues, "duplicate-id", path, "duplicate station name");
        if (std::abs(st.latitude_deg) > 90.0)
            add_issue(issues, "latitude-out-of-range", path, "|latitude| must be <= 90");
        if (!(st.min_elevation_deg >= 0.0 && st.min_elevation_deg < 90.0))
            add_issue(issues, "elevation-out-of-range", path,
                      "min_elevation must be in [0, 90)");
        for (const auto& b : st.supported_bands) {
            if (b != optical_band_label && !parse_band(b))
                add_issue(issues, "unknown-band", path, "unsupported band label " + b);
        }
    }

    std::set<std::string> experiment_ids;
    for (const auto& e : s.experiments) {
        const std::string path = "experiments[" + e.id + "]";
        if (!experiment_ids.insert(e.id).second)
            add_issue(issues, "duplicate-id", path, "duplicate experiment id");
        if (!(e.duration_s > 0.0))
            add_issue(issues, "experiment-duration", path, "duration must be positive");
        if (!(e.earliest_start_s < e.latest_end_s))
            add_issue(issues, "experiment-window", path,
                      "earliest_start must be before latest_end");
        if (e.data_production_rate_bps < 0.0)
            add_issue(issues, "data-rate-negative", path, "data rate cannot be negative");
        for (const auto& fid : e.required_frontends) {
            if (!frontend_ids.count(fid))
                add_issue(issues, "dangling-frontend", path,
                          "references unknown front-end " + fid);
        }
    }

    if (!(s.sim.time_step_s > 0.0))
        add_issue(issues, "time-step", "sim", "time_step must be positive");
    else if (!(s.sim.duration_s >= s.sim.time_step_s))
        add_issue(issues, "sim-duration", "sim", "duration must be at least one time step");

    return issues;
}

} // namespace starsim
