#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "starsim/energy.hpp"
#include "starsim/error.hpp"
#include "starsim/link.hpp"
#include "starsim/orbit.hpp"
#include "starsim/payload.hpp"
#include "starsim/scenario.hpp"
#include "starsim/scenario_io.hpp"
#include "starsim/schedule.hpp"

namespace starsim {

// Listed in the stable ordering applied to events sharing a timestamp.
enum class EventKind {
    ModeChange,
    PassStart,
    PassEnd,
    LinkOpen,
    LinkClose,
    Overflow,
    Depletion,
    ViolationEvent
};

inline std::string event_kind_label(EventKind k) {
    switch (k) {
        case EventKind::ModeChange: return "mode-change";
        case EventKind::PassStart: return "pass-start";
        case EventKind::PassEnd: return "pass-end";
        case EventKind::LinkOpen: return "link-open";
        case EventKind::LinkClose: return "link-close";
        case EventKind::Overflow: return "overflow";
        case EventKind::Depletion: return "depletion";
        case EventKind::ViolationEvent: return "violation";
    }
    return "?";
}

inline std::optional<EventKind> parse_event_kind(const std::string& label) {
    for (int k = 0; k <= static_cast<int>(EventKind::ViolationEvent); ++k) {
        if (event_kind_label(static_cast<EventKind>(k)) == label)
            return static_cast<EventKind>(k);
    }
    return std::nullopt;
}

struct SimEvent {
    double t = 0.0;
    EventKind kind = EventKind::ModeChange;
    std::string device;  // device id, station name, or subsystem label
    std::string detail;

    friend bool operator==(const SimEvent&, const SimEvent&) = default;
};

struct EnergySample {
    double t = 0.0;
    double soc_wh = 0.0;
    double generation_w = 0.0;
    double load_w = 0.0;

    friend bool operator==(const EnergySample&, const EnergySample&) = default;
};

struct StorageSample {
    double t = 0.0;
    std::uint64_t used_bits = 0;

    friend bool operator==(const StorageSample&, const StorageSample&) = default;
};

struct PassVolume {
    std::string station;
    std::string band;
    double t_start = 0.0;
    double t_end = 0.0;
    std::uint64_t bits = 0;

    friend bool operator==(const PassVolume&, const PassVolume&) = default;
};

struct DutyCycleSummary {
    std::vector<double> per_orbit;
    double min_value = 0.0;

    friend bool operator==(const DutyCycleSummary&, const DutyCycleSummary&) = default;
};

struct ReportViolation {
    std::string code;
    double t = 0.0;
    std::string detail;

    friend bool operator==(const ReportViolation&, const ReportViolation&) = default;
};

struct Totals {
    std::uint64_t produced_bits = 0;
    std::uint64_t downlinked_bits = 0;
    std::uint64_t dropped_bits = 0;
    std::uint64_t remaining_bits = 0;

    friend bool operator==(const Totals&, const Totals&) = default;
};

struct Report {
    std::string scenario_digest;
    std::vector<SimEvent> events;
    std::vector<EnergySample> energy_trace;
    std::vector<StorageSample> storage_trace;
    std::vector<PassVolume> pass_volumes;
    DutyCycleSummary duty_cycle;
    std::vector<ReportViolation> violations;
    Totals totals;

    friend bool operator==(const Report&, const Report&) = default;
};

struct RunOptions {
    bool force = false;  // execute despite schedule violations
};

namespace detail {

inline std::string fnv1a64_hex(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Walks a device to the target mode one legal step at a time, recording
/// each transition.
inline void walk_mode(PayloadState& ps, const std::string& device, DeviceMode target, double t,
                      std::vector<SimEvent>& events) {
    auto current = [&]() {
        return device == optical_device_id ? ps.optical_mode : ps.sdrs.at(device).mode;
    };
    while (current() != target) {
        const int dir = static_cast<int>(target) > static_cast<int>(current()) ? 1 : -1;
        const auto next = static_cast<DeviceMode>(static_cast<int>(current()) + dir);
        ps = set_mode(std::move(ps), device, next);
        events.push_back({t, EventKind::ModeChange, device, device_mode_label(next)});
    }
}

} // namespace detail

/// Executes a schedule against the scenario as a deterministic event loop:
/// time advances on the scenario step grid split at every entry and pass
/// boundary, so device loads are constant within each segment and the Euler
/// battery update is exact per segment. The battery starts full and the data
/// store empty.
///
/// The schedule must validate cleanly unless `force` is set, in which case
/// the violations are carried into the report and re-emitted as events.
inline Report run(const Scenario& scenario, const Schedule& schedule,
                  const LinkConfig& link = default_link_config(),
                  const RunOptions& options = {}) {
    if (const auto issues = validate_scenario(scenario); !issues.empty())
        throw Error("invalid-scenario",
                    issues.front().path + ": " + issues.front().message);

    Schedule sched = schedule;
    sched.normalize();
    const double horizon = scenario.sim.duration_s;
    const double step = scenario.sim.time_step_s;
    const std::uint64_t capacity_bits = scenario.platform.data_storage_bits;

    const auto passes =
        find_all_passes(scenario.orbit, scenario.stations, 0.0, horizon, step);

    const auto violations = validate(sched, scenario, passes, link);
    if (!violations.empty() && !options.force)
        throw Error("schedule-invalid",
                    violations.front().code + " at t=" + std::to_string(violations.front().t) +
                        ": " + violations.front().detail);

    // Segment boundaries: step grid, entry edges, pass edges.
    std::vector<double> bp;
    for (std::size_t k = 0; static_cast<double>(k) * step < horizon; ++k)
        bp.push_back(static_cast<double>(k) * step);
    bp.push_back(horizon);
    for (const auto& e : sched.entries) {
        bp.push_back(std::clamp(e.t_start, 0.0, horizon));
        bp.push_back(std::clamp(e.t_end, 0.0, horizon));
    }
    for (const auto& p : passes) {
        bp.push_back(std::clamp(p.t_start, 0.0, horizon));
        bp.push_back(std::clamp(p.t_end, 0.0, horizon));
    }
    std::sort(bp.begin(), bp.end());
    std::vector<double> bounds;
    for (double t : bp) {
        if (bounds.empty() || t - bounds.back() > 1e-6) bounds.push_back(t);
    }
    if (!bounds.empty()) bounds.back() = horizon;

    Report report;
    report.scenario_digest = detail::fnv1a64_hex(emit_scenario(scenario));
    for (const auto& v : violations) {
        report.violations.push_back({v.code, v.t, v.detail});
        report.events.push_back({v.t, EventKind::ViolationEvent, "", v.code + ": " + v.detail});
    }

    PayloadState ps = initial_payload_state(scenario);
    EnergyState es{scenario.platform.battery_capacity_wh, 0.0, 0.0, 0.0};
    bool was_depleted = false;

    std::map<std::string, bool> link_open;  // "station|band" -> state
    struct VolumeKey {
        std::string station;
        double t_start;
        std::string band;
        bool operator<(const VolumeKey& o) const {
            if (t_start != o.t_start) return t_start < o.t_start;
            if (station != o.station) return station < o.station;
            return band < o.band;
        }
    };
    std::map<VolumeKey, std::pair<double, std::uint64_t>> volumes;  // -> (t_end, bits)

    auto pass_at = [&](const std::string& station, double t) -> const PassWindow* {
        for (const auto& p : passes) {
            if (p.station == station && t >= p.t_start && t < p.t_end) return &p;
        }
        return nullptr;
    };

    for (std::size_t i = 0; i < bounds.size(); ++i) {
        const double t = bounds[i];

        // Desired device states from the entries active at t.
        std::map<std::string, std::string> desired_slot;  // sdr -> front-end
        bool optical_active = false;
        std::set<std::string> running;
        for (const auto& e : sched.entries) {
            if (!e.active_at(t)) continue;
            if (e.kind == EntryKind::Experiment) running.insert(e.id);
            for (const auto& dev : e.devices) {
                if (dev == optical_device_id) {
                    optical_active = true;
                    continue;
                }
                if (scenario.find_frontend(dev) != nullptr) {
                    if (const SdrUnit* host = scenario.host_sdr(dev))
                        desired_slot.emplace(host->id, dev);
                }
            }
        }

        for (const auto& [sdr_id, state] : ps.sdrs) {
            const auto want = desired_slot.find(sdr_id);
            if (want == desired_slot.end()) {
                detail::walk_mode(ps, sdr_id, DeviceMode::Off, t, report.events);
                continue;
            }
            if (state.active_slot && *state.active_slot != want->second)
                detail::walk_mode(ps, sdr_id, DeviceMode::Standby, t, report.events);
            detail::walk_mode(ps, sdr_id, DeviceMode::Active, t, report.events);
            if (!ps.sdrs.at(sdr_id).active_slot) {
                ps = activate_frontend(std::move(ps), sdr_id, want->second, scenario);
                report.events.push_back(
                    {t, EventKind::ModeChange, sdr_id, "slot " + want->second});
            }
        }
        detail::walk_mode(ps, optical_device_id,
                          optical_active ? DeviceMode::Active : DeviceMode::Off, t,
                          report.events);
        ps.active_experiments = running;

        // Pass boundaries and link state transitions.
        for (const auto& p : passes) {
            if (std::abs(p.t_start - t) < 1e-6)
                report.events.push_back({t, EventKind::PassStart, p.station, ""});
            if (std::abs(p.t_end - t) < 1e-6)
                report.events.push_back({t, EventKind::PassEnd, p.station, ""});
        }
        for (const auto& station : scenario.stations) {
            const PassWindow* pass = pass_at(station.name, t);
            for (const auto& band : station.supported_bands) {
                const std::string key = station.name + "|" + band;
                bool open_now = false;
                if (pass != nullptr) {
                    const GeoSample g = detail::geo_sample_at(scenario.orbit, station, t);
                    ScheduleEntry probe;
                    probe.kind = EntryKind::Downlink;
                    probe.band = band;
                    open_now = detail::link_closed_at(probe, g, scenario, link);
                }
                const bool was_open = link_open[key];
                if (open_now != was_open) {
                    report.events.push_back({t,
                                             open_now ? EventKind::LinkOpen
                                                      : EventKind::LinkClose,
                                             station.name, band});
                    link_open[key] = open_now;
                }
            }
        }

        // Instantaneous profile at t.
        const LoadProfile load = total_load(ps, scenario);
        const double gen = generation_at(t, scenario.orbit, scenario.generation);
        report.energy_trace.push_back({t, es.soc_wh, gen, load.total_w});
        report.storage_trace.push_back({t, ps.storage_used_bits});

        if (i + 1 == bounds.size()) break;
        const double dt = bounds[i + 1] - t;

        // Battery.
        const auto er = energy_step(es, gen, load.total_w, dt,
                                    scenario.platform.battery_capacity_wh);
        if (er.depleted && !was_depleted) {
            double t_cross = bounds[i + 1];
            if (load.total_w > gen)
                t_cross = std::min(t_cross, t + es.soc_wh * 3600.0 / (load.total_w - gen));
            report.events.push_back(
                {t_cross, EventKind::Depletion, "battery", "state of charge reached zero"});
        }
        was_depleted = er.depleted;
        es = er.state;

        // Data production.
        for (const auto& exp_id : ps.active_experiments) {
            const ExperimentSpec* exp = scenario.find_experiment(exp_id);
            if (exp == nullptr || exp->data_production_rate_bps <= 0.0) continue;
            const auto bits = static_cast<std::uint64_t>(
                std::llround(exp->data_production_rate_bps * dt));
            report.totals.produced_bits += bits;
            auto rec = record_data(std::move(ps), bits, capacity_bits);
            ps = std::move(rec.state);
            if (rec.dropped_bits > 0) {
                report.totals.dropped_bits += rec.dropped_bits;
                report.events.push_back({bounds[i + 1], EventKind::Overflow, "storage",
                                         std::to_string(rec.dropped_bits) + " bits dropped"});
            }
        }

        // Downlink drains.
        for (const auto& e : sched.entries) {
            if (e.kind != EntryKind::Downlink || !e.active_at(t)) continue;
            const GroundStation* st = scenario.find_station(e.station);
            const PassWindow* pass = pass_at(e.station, t);
            if (st == nullptr || pass == nullptr) continue;
            const GeoSample g = detail::geo_sample_at(scenario.orbit, *st, t);
            if (!detail::link_closed_at(e, g, scenario, link)) continue;
            const double rate = detail::downlink_rate_bps(e, scenario);
            const auto want = static_cast<std::uint64_t>(std::llround(rate * dt));
            auto dr = drain_data(std::move(ps), want);
            ps = std::move(dr.state);
            report.totals.downlinked_bits += dr.drained_bits;
            auto& vol = volumes[VolumeKey{pass->station, pass->t_start, e.band}];
            vol.first = pass->t_end;
            vol.second += dr.drained_bits;
        }
    }

    for (const auto& [key, val] : volumes)
        report.pass_volumes.push_back({key.station, key.band, key.t_start, val.first, val.second});

    report.totals.remaining_bits = ps.storage_used_bits;

    const DutyCycle d = duty_cycle(sched, orbital_period(scenario.orbit.altitude_km), horizon);
    report.duty_cycle = {d.per_orbit, d.min_value};

    std::stable_sort(report.events.begin(), report.events.end(),
                     [](const SimEvent& a, const SimEvent& b) {
                         if (a.t != b.t) return a.t < b.t;
                         return static_cast<int>(a.kind) < static_cast<int>(b.kind);
                     });
    return report;
}

} // namespace starsim
