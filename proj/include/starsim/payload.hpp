#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "starsim/error.hpp"
#include "starsim/scenario.hpp"

namespace starsim {

enum class DeviceMode { Off, Standby, Active };

inline std::string device_mode_label(DeviceMode m) {
    switch (m) {
        case DeviceMode::Off: return "off";
        case DeviceMode::Standby: return "standby";
        case DeviceMode::Active: return "active";
    }
    return "?";
}

/// Device id used for the laser terminal in mode operations and schedules.
inline constexpr const char* optical_device_id = "optical";

struct SdrState {
    DeviceMode mode = DeviceMode::Off;
    std::optional<std::string> active_slot;  // set only while Active
};

struct PayloadState {
    std::map<std::string, SdrState> sdrs;
    DeviceMode optical_mode = DeviceMode::Off;
    std::uint64_t storage_used_bits = 0;
    std::set<std::string> active_experiments;
};

inline PayloadState initial_payload_state(const Scenario& s) {
    PayloadState st;
    for (const auto& sdr : s.sdrs) st.sdrs[sdr.id] = SdrState{};
    return st;
}

namespace detail {

// Legal transitions move one level at a time: Off <-> Standby <-> Active.
inline bool transition_legal(DeviceMode from, DeviceMode to) {
    const int a = static_cast<int>(from), b = static_cast<int>(to);
    return a == b || a - b == 1 || b - a == 1;
}

} // namespace detail

/// Switches one device (an SDR id or "optical") to `mode`. Deactivating an
/// SDR clears its active slot.
inline PayloadState set_mode(PayloadState state, const std::string& device, DeviceMode mode) {
    if (device == optical_device_id) {
        if (!detail::transition_legal(state.optical_mode, mode))
            throw Error("illegal-transition",
                        "optical: " + device_mode_label(state.optical_mode) + " -> " +
                            device_mode_label(mode));
        state.optical_mode = mode;
        return state;
    }
    const auto it = state.sdrs.find(device);
    if (it == state.sdrs.end()) throw Error("unknown-device", "no such device: " + device);
    if (!detail::transition_legal(it->second.mode, mode))
        throw Error("illegal-transition", device + ": " + device_mode_label(it->second.mode) +
                                              " -> " + device_mode_label(mode));
    it->second.mode = mode;
    if (mode != DeviceMode::Active) it->second.active_slot.reset();
    return state;
}

/// Routes one of the SDR's two slots to its transceiver chain. Only one slot
/// can be live per SDR at a time.
inline PayloadState activate_frontend(PayloadState state, const std::string& sdr_id,
                                      const std::string& frontend_id, const Scenario& scenario) {
    const SdrUnit* sdr = scenario.find_sdr(sdr_id);
    if (sdr == nullptr) throw Error("unknown-device", "no such SDR: " + sdr_id);
    const auto it = state.sdrs.find(sdr_id);
    if (it == state.sdrs.end() || it->second.mode != DeviceMode::Active)
        throw Error("sdr-not-active", sdr_id + " must be active to route a front-end");
    bool is_slot = false;
    for (const auto& slot : sdr->slots) is_slot = is_slot || slot == frontend_id;
    if (!is_slot)
        throw Error("not-a-slot", frontend_id + " is not a slot of " + sdr_id);
    if (it->second.active_slot && *it->second.active_slot != frontend_id)
        throw Error("slot-busy", sdr_id + " already drives " + *it->second.active_slot);
    it->second.active_slot = frontend_id;
    return state;
}

struct RecordResult {
    PayloadState state;
    std::uint64_t dropped_bits = 0;  // tail-dropped past the storage cap
};

/// Appends produced payload data to the store. Data past the capacity is
/// dropped (newest first) and reported, never an error.
inline RecordResult record_data(PayloadState state, std::uint64_t bits,
                                std::uint64_t capacity_bits) {
    RecordResult r;
    const std::uint64_t space = capacity_bits - state.storage_used_bits;
    if (bits > space) {
        r.dropped_bits = bits - space;
        state.storage_used_bits = capacity_bits;
    } else {
        state.storage_used_bits += bits;
    }
    r.state = std::move(state);
    return r;
}

struct DrainResult {
    PayloadState state;
    std::uint64_t drained_bits = 0;
};

/// Removes downlinked data from the store; never drains more than is held.
inline DrainResult drain_data(PayloadState state, std::uint64_t bits) {
    DrainResult r;
    r.drained_bits = std::min(bits, state.storage_used_bits);
    state.storage_used_bits -= r.drained_bits;
    r.state = std::move(state);
    return r;
}

struct FlatsatFinding {
    std::string code;
    std::string message;
};

/// Pre-flight bench verification of one experiment request: resource
/// conflicts, worst-case power against the platform supply, produced data
/// against the store, and the requested time window. An empty result is a
/// pass.
inline std::vector<FlatsatFinding> flatsat_check(const ExperimentSpec& exp,
                                                 const Scenario& scenario) {
    std::vector<FlatsatFinding> findings;

    std::set<std::string> host_sdrs;
    std::map<std::string, std::vector<std::string>> per_sdr;
    for (const auto& fid : exp.required_frontends) {
        if (scenario.find_frontend(fid) == nullptr) {
            findings.push_back({"unknown-frontend", exp.id + " requests unknown " + fid});
            continue;
        }
        const SdrUnit* host = scenario.host_sdr(fid);
        if (host == nullptr) {
            findings.push_back({"unknown-frontend", fid + " is not mapped to any SDR slot"});
            continue;
        }
        host_sdrs.insert(host->id);
        per_sdr[host->id].push_back(fid);
    }
    for (const auto& [sdr, fes] : per_sdr) {
        if (fes.size() > 1)
            findings.push_back({"slot-conflict", exp.id + " needs " + std::to_string(fes.size()) +
                                                     " simultaneous slots of " + sdr});
    }

    double worst_load = exp.extra_power_w;
    for (const auto& sdr_id : host_sdrs) {
        if (const SdrUnit* sdr = scenario.find_sdr(sdr_id)) worst_load += sdr->active_power_w;
    }
    if (exp.requires_optical) worst_load += scenario.optical.peak_power_w;
    if (worst_load > scenario.platform.supply_peak_w)
        findings.push_back({"exceeds-peak-supply",
                            exp.id + " draws " + std::to_string(worst_load) + " W against a " +
                                std::to_string(scenario.platform.supply_peak_w) + " W peak supply"});

    const double produced_bits = exp.data_production_rate_bps * exp.duration_s;
    if (produced_bits > static_cast<double>(scenario.platform.data_storage_bits))
        findings.push_back(
            {"exceeds-storage", exp.id + " would produce more data than the store holds"});

    if (exp.duration_s > exp.latest_end_s - exp.earliest_start_s)
        findings.push_back(
            {"window-too-small", exp.id + " cannot fit its duration inside its time window"});

    return findings;
}

} // namespace starsim
