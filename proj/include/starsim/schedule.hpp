#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "starsim/energy.hpp"
#include "starsim/error.hpp"
#include "starsim/link.hpp"
#include "starsim/orbit.hpp"
#include "starsim/scenario.hpp"

namespace starsim {

// Continuous load above the nominal supply is tolerated up to this long.
inline constexpr double sustained_window_s = 600.0;

enum class EntryKind { Experiment, Downlink };

inline std::string entry_kind_label(EntryKind k) {
    return k == EntryKind::Experiment ? "experiment" : "downlink";
}

struct ScheduleEntry {
    std::string id;  // experiment id, or a downlink tag
    EntryKind kind = EntryKind::Experiment;
    double t_start = 0.0;
    double t_end = 0.0;
    std::set<std::string> devices;  // SDR ids, front-end ids, "optical"
    std::string band;               // band label, "optical", or empty
    std::string station;            // downlink entries only

    bool overlaps(const ScheduleEntry& o) const {
        return t_start < o.t_end && o.t_start < t_end;
    }
    bool active_at(double t) const { return t >= t_start && t < t_end; }
};

struct Schedule {
    std::vector<ScheduleEntry> entries;  // sorted by (t_start, id)

    void normalize() {
        std::sort(entries.begin(), entries.end(),
                  [](const ScheduleEntry& a, const ScheduleEntry& b) {
                      return a.t_start != b.t_start ? a.t_start < b.t_start : a.id < b.id;
                  });
    }
};

struct Violation {
    std::string code;  // slot-conflict | peak-supply | nominal-supply |
                       // duty-floor | storage-overflow | window-miss
    double t = 0.0;
    std::string detail;
};

struct DutyCycle {
    std::vector<double> per_orbit;
    double min_value = 0.0;
};

// ---------------------------------------------------------------------------
// Entry construction helpers
// ---------------------------------------------------------------------------

/// Device set for an experiment: each required front-end plus its hosting
/// SDR, plus the laser terminal when requested.
inline std::set<std::string> devices_for_experiment(const ExperimentSpec& exp,
                                                    const Scenario& scenario) {
    std::set<std::string> devices;
    for (const auto& fid : exp.required_frontends) {
        devices.insert(fid);
        if (const SdrUnit* host = scenario.host_sdr(fid)) devices.insert(host->id);
    }
    if (exp.requires_optical) devices.insert(optical_device_id);
    return devices;
}

inline std::string band_for_experiment(const ExperimentSpec& exp, const Scenario& scenario) {
    if (!exp.required_frontends.empty()) {
        if (const FrontEnd* fe = scenario.find_frontend(*exp.required_frontends.begin()))
            return band_label(fe->band);
    }
    return exp.requires_optical ? optical_band_label : "";
}

inline ScheduleEntry make_experiment_entry(const ExperimentSpec& exp, double t_start,
                                           const Scenario& scenario) {
    ScheduleEntry e;
    e.id = exp.id;
    e.kind = EntryKind::Experiment;
    e.t_start = t_start;
    e.t_end = t_start + exp.duration_s;
    e.devices = devices_for_experiment(exp, scenario);
    e.band = band_for_experiment(exp, scenario);
    return e;
}

// ---------------------------------------------------------------------------
// Internal accounting shared by validate() and the planners
// ---------------------------------------------------------------------------

namespace detail {

/// Instantaneous draw of one entry: active power of its devices plus, for
/// experiments, the request's extra power.
inline double entry_power_w(const ScheduleEntry& e, const Scenario& scenario) {
    double w = 0.0;
    for (const auto& dev : e.devices) {
        if (dev == optical_device_id)
            w += scenario.optical.peak_power_w;
        else if (const SdrUnit* sdr = scenario.find_sdr(dev))
            w += sdr->active_power_w;
    }
    if (e.kind == EntryKind::Experiment) {
        const ExperimentSpec* exp = scenario.find_experiment(e.id);
        if (exp == nullptr)
            throw Error("reference", "schedule entry names unknown experiment " + e.id);
        w += exp->extra_power_w;
    }
    return w;
}

inline double entry_data_rate_bps(const ScheduleEntry& e, const Scenario& scenario) {
    if (e.kind != EntryKind::Experiment) return 0.0;
    const ExperimentSpec* exp = scenario.find_experiment(e.id);
    return exp != nullptr ? exp->data_production_rate_bps : 0.0;
}

/// Gross rate of the band a downlink entry drains through.
inline double downlink_rate_bps(const ScheduleEntry& e, const Scenario& scenario) {
    if (e.band == optical_band_label) return scenario.optical.downlink_max_rate_bps;
    if (const auto band = parse_band(e.band)) {
        if (const FrontEnd* fe = scenario.frontend_for_band(*band))
            return fe->max_gross_rate_bps;
    }
    return 0.0;
}

/// Closure of a downlink entry's band at one geometry sample.
inline bool link_closed_at(const ScheduleEntry& e, const GeoSample& g, const Scenario& scenario,
                           const LinkConfig& link) {
    if (e.band == optical_band_label) {
        return optical_assess(scenario.optical, g.slant_range_km,
                              scenario.optical.pointing_error_3sigma_deg,
                              OpticalDirection::Down)
            .closed;
    }
    const auto band = parse_band(e.band);
    if (!band) return false;
    const FrontEnd* fe = scenario.frontend_for_band(*band);
    if (fe == nullptr) return false;
    return rf_assess(*fe, params_for_band(link, e.band), g.slant_range_km).closed;
}

/// Total length of the union of entry intervals clipped to [lo, hi).
inline double union_length(const std::vector<ScheduleEntry>& entries, double lo, double hi) {
    std::vector<std::pair<double, double>> spans;
    for (const auto& e : entries) {
        const double a = std::max(e.t_start, lo), b = std::min(e.t_end, hi);
        if (a < b) spans.emplace_back(a, b);
    }
    std::sort(spans.begin(), spans.end());
    double total = 0.0, cur_a = 0.0, cur_b = -1.0;
    for (const auto& [a, b] : spans) {
        if (cur_b < cur_a || a > cur_b) {
            if (cur_b > cur_a) total += cur_b - cur_a;
            cur_a = a;
            cur_b = b;
        } else {
            cur_b = std::max(cur_b, b);
        }
    }
    if (cur_b > cur_a) total += cur_b - cur_a;
    return total;
}

} // namespace detail

/// Payload duty cycle per consecutive orbit window of length T within the
/// horizon (trailing partial windows are not scored), plus the minimum.
inline DutyCycle duty_cycle(const Schedule& sched, double period_s, double horizon_s) {
    if (!(period_s > 0.0)) throw std::domain_error("duty_cycle: period must be positive");
    DutyCycle d;
    const auto orbits = static_cast<std::size_t>(std::floor(horizon_s / period_s + 1e-9));
    for (std::size_t k = 0; k < orbits; ++k) {
        const double lo = static_cast<double>(k) * period_s;
        d.per_orbit.push_back(detail::union_length(sched.entries, lo, lo + period_s) / period_s);
    }
    d.min_value = d.per_orbit.empty()
                      ? 0.0
                      : *std::min_element(d.per_orbit.begin(), d.per_orbit.end());
    return d;
}

/// Checks a schedule against every platform contract: exclusive device use,
/// instantaneous and sustained supply caps, the per-orbit duty floor (when
/// the scenario demands it), storage against cumulative production, and
/// pass/window containment. Returns all violations found; an empty list
/// means the schedule is executable as planned.
///
/// The storage check charges production only; downlink drains are credited
/// by the simulation, not here, which keeps the check monotone under entry
/// removal.
inline std::vector<Violation> validate(const Schedule& sched, const Scenario& scenario,
                                       const std::vector<PassWindow>& passes,
                                       const LinkConfig& link = default_link_config()) {
    std::vector<Violation> out;
    Schedule s = sched;
    s.normalize();
    const double horizon = scenario.sim.duration_s;

    for (const auto& e : s.entries) {
        if (!(e.t_start < e.t_end))
            throw Error("schema", "entry " + e.id + " has a non-positive duration");
        for (const auto& dev : e.devices) {
            if (dev == optical_device_id || scenario.find_sdr(dev)) continue;
            const FrontEnd* fe = scenario.find_frontend(dev);
            if (fe == nullptr) throw Error("reference", "entry " + e.id + " uses unknown device " + dev);
            const SdrUnit* host = scenario.host_sdr(dev);
            if (host == nullptr || !e.devices.count(host->id))
                throw Error("schema", "entry " + e.id + " routes " + dev +
                                          " without its hosting SDR");
        }
    }

    // One live slot per SDR, even within a single entry.
    for (const auto& e : s.entries) {
        std::map<std::string, int> per_sdr;
        for (const auto& dev : e.devices) {
            if (scenario.find_frontend(dev) == nullptr) continue;
            if (const SdrUnit* host = scenario.host_sdr(dev)) ++per_sdr[host->id];
        }
        for (const auto& [sdr, n] : per_sdr) {
            if (n > 1)
                out.push_back({"slot-conflict", e.t_start,
                               e.id + " demands " + std::to_string(n) + " slots of " + sdr});
        }
    }

    // Exclusive device use across overlapping entries.
    for (std::size_t i = 0; i < s.entries.size(); ++i) {
        for (std::size_t j = i + 1; j < s.entries.size(); ++j) {
            const auto& a = s.entries[i];
            const auto& b = s.entries[j];
            if (!a.overlaps(b)) continue;
            for (const auto& dev : a.devices) {
                if (b.devices.count(dev)) {
                    out.push_back({"slot-conflict", std::max(a.t_start, b.t_start),
                                   a.id + " and " + b.id + " both use " + dev});
                    break;
                }
            }
        }
    }

    // Piecewise-constant load profile over entry boundaries.
    std::vector<double> cuts;
    for (const auto& e : s.entries) {
        cuts.push_back(std::clamp(e.t_start, 0.0, horizon));
        cuts.push_back(std::clamp(e.t_end, 0.0, horizon));
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double over_nominal_since = -1.0;
    double peak_run_start = -1.0;
    auto flush_nominal = [&](double t_now) {
        if (over_nominal_since >= 0.0 && t_now - over_nominal_since >= sustained_window_s)
            out.push_back({"nominal-supply", over_nominal_since,
                           "load above nominal supply for " +
                               std::to_string(t_now - over_nominal_since) + " s"});
        over_nominal_since = -1.0;
    };
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double t = cuts[i];
        double load = 0.0;
        for (const auto& e : s.entries)
            if (e.active_at(t)) load += detail::entry_power_w(e, scenario);

        if (load > scenario.platform.supply_peak_w) {
            if (peak_run_start < 0.0) {
                peak_run_start = t;
                out.push_back({"peak-supply", t,
                               "instantaneous load " + std::to_string(load) + " W exceeds " +
                                   std::to_string(scenario.platform.supply_peak_w) + " W"});
            }
        } else {
            peak_run_start = -1.0;
        }

        if (load > scenario.platform.supply_nominal_w) {
            if (over_nominal_since < 0.0) over_nominal_since = t;
        } else {
            flush_nominal(t);
        }
    }
    if (!cuts.empty()) flush_nominal(cuts.back());

    // Duty floor, per orbit, when the scenario demands it.
    if (scenario.sim.enforce_duty_floor) {
        const double T = orbital_period(scenario.orbit.altitude_km);
        const DutyCycle d = duty_cycle(s, T, horizon);
        for (std::size_t k = 0; k < d.per_orbit.size(); ++k) {
            if (d.per_orbit[k] + 1e-12 < scenario.platform.duty_cycle_floor)
                out.push_back({"duty-floor", static_cast<double>(k) * T,
                               "orbit " + std::to_string(k) + " duty cycle " +
                                   std::to_string(d.per_orbit[k]) + " below floor"});
        }
    }

    // Storage against cumulative production.
    {
        struct RateEvent {
            double t;
            double delta_bps;
        };
        std::vector<RateEvent> ev;
        for (const auto& e : s.entries) {
            const double rate = detail::entry_data_rate_bps(e, scenario);
            if (rate <= 0.0) continue;
            ev.push_back({std::clamp(e.t_start, 0.0, horizon), rate});
            ev.push_back({std::clamp(e.t_end, 0.0, horizon), -rate});
        }
        std::sort(ev.begin(), ev.end(), [](const RateEvent& a, const RateEvent& b) {
            return a.t < b.t;
        });
        double produced = 0.0, rate = 0.0, t_prev = 0.0;
        const double cap = static_cast<double>(scenario.platform.data_storage_bits);
        bool reported = false;
        for (const auto& [t, delta] : ev) {
            if (!reported && rate > 0.0 && produced + rate * (t - t_prev) > cap) {
                const double t_cross = t_prev + (cap - produced) / rate;
                out.push_back({"storage-overflow", t_cross,
                               "cumulative production exceeds the data store"});
                reported = true;
            }
            produced += rate * (t - t_prev);
            rate += delta;
            t_prev = t;
        }
    }

    // Window containment.
    for (const auto& e : s.entries) {
        if (e.t_start < 0.0 || e.t_end > horizon) {
            out.push_back({"window-miss", std::clamp(e.t_start, 0.0, horizon),
                           e.id + " lies outside the simulation horizon"});
            continue;
        }
        if (e.kind == EntryKind::Experiment) {
            const ExperimentSpec* exp = scenario.find_experiment(e.id);
            if (exp == nullptr)
                throw Error("reference", "schedule entry names unknown experiment " + e.id);
            if (e.t_start < exp->earliest_start_s - 1e-9 || e.t_end > exp->latest_end_s + 1e-9)
                out.push_back({"window-miss", e.t_start,
                               e.id + " runs outside its requested time window"});
            if (std::abs((e.t_end - e.t_start) - exp->duration_s) > 1e-6)
                out.push_back({"window-miss", e.t_start,
                               e.id + " entry length differs from the requested duration"});
        } else {
            const PassWindow* containing = nullptr;
            for (const auto& p : passes) {
                if (p.station == e.station && p.t_start <= e.t_start + 1e-9 &&
                    e.t_end <= p.t_end + 1e-9) {
                    containing = &p;
                    break;
                }
            }
            if (containing == nullptr) {
                out.push_back({"window-miss", e.t_start,
                               e.id + " lies outside any pass of " + e.station});
                continue;
            }
            const GroundStation* st = scenario.find_station(e.station);
            bool closed_throughout = st != nullptr;
            if (st != nullptr) {
                std::vector<GeoSample> checks;
                checks.push_back(detail::geo_sample_at(scenario.orbit, *st, e.t_start));
                for (const auto& g : containing->samples)
                    if (g.t > e.t_start && g.t < e.t_end) checks.push_back(g);
                checks.push_back(detail::geo_sample_at(scenario.orbit, *st, e.t_end));
                for (const auto& g : checks)
                    closed_throughout =
                        closed_throughout && detail::link_closed_at(e, g, scenario, link);
            }
            if (!closed_throughout)
                out.push_back({"window-miss", e.t_start,
                               e.id + " is not link-closed throughout the pass"});
        }
    }

    // Violations cite timestamps inside the simulation horizon.
    for (auto& v : out) v.t = std::clamp(v.t, 0.0, horizon);
    std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
        return a.t != b.t ? a.t < b.t : a.code < b.code;
    });
    return out;
}

} // namespace starsim
