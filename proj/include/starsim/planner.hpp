#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "starsim/schedule.hpp"

namespace starsim {

struct SkippedRequest {
    std::string id;
    std::string reason;
};

struct PlanResult {
    Schedule schedule;
    std::vector<SkippedRequest> skipped;
};

namespace detail {

inline std::vector<ExperimentSpec> plan_order(std::vector<ExperimentSpec> requests) {
    std::sort(requests.begin(), requests.end(),
              [](const ExperimentSpec& a, const ExperimentSpec& b) {
                  if (a.priority != b.priority) return a.priority > b.priority;
                  if (a.earliest_start_s != b.earliest_start_s)
                      return a.earliest_start_s < b.earliest_start_s;
                  return a.id < b.id;
              });
    return requests;
}

/// True when adding `candidate` to `current` keeps the schedule free of
/// entry-attributable violations. The duty floor is a whole-schedule
/// property that later placements can only improve, so it is not charged
/// against individual candidates.
inline bool placement_feasible(const Schedule& current, const ScheduleEntry& candidate,
                               const Scenario& scenario, const std::vector<PassWindow>& passes,
                               const LinkConfig& link) {
    Schedule trial = current;
    trial.entries.push_back(candidate);
    for (const auto& v : validate(trial, scenario, passes, link))
        if (v.code != "duty-floor") return false;
    return true;
}

} // namespace detail

/// Priority-ordered greedy placement: requests sorted by (priority desc,
/// earliest start asc, id asc) are placed at the earliest candidate time that
/// passes every schedule contract. Candidate times are the request's earliest
/// start and the boundaries of already-placed entries. Requests with no
/// feasible placement are skipped with a reason; the returned schedule always
/// validates clean (up to the duty floor, which depends on what was
/// requested, not on how it was placed).
inline PlanResult plan_greedy_experiments(const std::vector<ExperimentSpec>& requests,
                                          const std::vector<PassWindow>& passes,
                                          const Scenario& scenario,
                                          const LinkConfig& link = default_link_config()) {
    PlanResult result;
    const double horizon = scenario.sim.duration_s;

    for (const auto& req : detail::plan_order(requests)) {
        bool devices_known = true;
        for (const auto& fid : req.required_frontends)
            devices_known = devices_known && scenario.find_frontend(fid) != nullptr &&
                            scenario.host_sdr(fid) != nullptr;
        if (!devices_known) {
            result.skipped.push_back({req.id, "unknown-frontend"});
            continue;
        }

        const double latest_start =
            std::min(req.latest_end_s, horizon) - req.duration_s;
        std::set<double> candidates;
        if (req.earliest_start_s <= latest_start)
            candidates.insert(std::max(0.0, req.earliest_start_s));
        for (const auto& e : result.schedule.entries) {
            for (double t : {e.t_start, e.t_end}) {
                if (t >= req.earliest_start_s && t <= latest_start && t >= 0.0)
                    candidates.insert(t);
            }
        }

        bool placed = false;
        for (double t : candidates) {
            const ScheduleEntry entry = make_experiment_entry(req, t, scenario);
            if (detail::placement_feasible(result.schedule, entry, scenario, passes, link)) {
                result.schedule.entries.push_back(entry);
                result.schedule.normalize();
                placed = true;
                break;
            }
        }
        if (!placed) result.skipped.push_back({req.id, "no-feasible-slot"});
    }
    return result;
}

namespace detail {

struct DownlinkOption {
    std::string band;  // band label or "optical"
    double rate_bps;
    std::set<std::string> devices;
};

/// Station-supported downlink routes, best gross rate first.
inline std::vector<DownlinkOption> downlink_options(const GroundStation& st,
                                                    const Scenario& scenario) {
    std::vector<DownlinkOption> opts;
    for (const auto& label : st.supported_bands) {
        if (label == optical_band_label) {
            opts.push_back({optical_band_label, scenario.optical.downlink_max_rate_bps,
                            {optical_device_id}});
            continue;
        }
        const auto band = parse_band(label);
        if (!band) continue;
        const FrontEnd* fe = scenario.frontend_for_band(*band);
        if (fe == nullptr) continue;
        const SdrUnit* host = scenario.host_sdr(fe->id);
        if (host == nullptr) continue;
        opts.push_back({band_label(*band), fe->max_gross_rate_bps, {fe->id, host->id}});
    }
    std::sort(opts.begin(), opts.end(), [](const DownlinkOption& a, const DownlinkOption& b) {
        return a.rate_bps != b.rate_bps ? a.rate_bps > b.rate_bps : a.band < b.band;
    });
    return opts;
}

/// Longest maximal run of consecutive pass samples where the band closes.
inline std::optional<std::pair<double, double>> longest_closed_run(
    const PassWindow& pass, const ScheduleEntry& probe, const Scenario& scenario,
    const LinkConfig& link) {
    std::vector<std::pair<double, bool>> flags;
    flags.reserve(pass.samples.size());
    for (const auto& g : pass.samples)
        flags.emplace_back(g.t, link_closed_at(probe, g, scenario, link));

    std::optional<std::pair<double, double>> best;
    std::size_t i = 0;
    while (i < flags.size()) {
        if (!flags[i].second) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < flags.size() && flags[j + 1].second) ++j;
        const double a = flags[i].first, b = flags[j].first;
        if (!best || b - a > best->second - best->first) best = {a, b};
        i = j + 1;
    }
    return best;
}

} // namespace detail

/// Opportunistic downlink insertion: walks the passes in start order and
/// adds, per pass, one store-draining session on the fastest supported band
/// whose link closes, provided the addition keeps the schedule clean and the
/// store is expected to hold data by the end of the pass. Sessions drain the
/// store oldest-first at execution time.
inline void insert_downlinks(Schedule& schedule, const std::vector<PassWindow>& passes,
                             const Scenario& scenario,
                             const LinkConfig& link = default_link_config(),
                             double min_session_s = 60.0) {
    const auto produced_before = [&](double t) {
        double bits = 0.0;
        for (const auto& e : schedule.entries) {
            if (e.kind != EntryKind::Experiment) continue;
            bits += detail::entry_data_rate_bps(e, scenario) *
                    std::max(0.0, std::min(e.t_end, t) - e.t_start);
        }
        return bits;
    };

    int seq = 0;
    double allocated_bits = 0.0;
    for (const auto& pass : passes) {
        const GroundStation* st = scenario.find_station(pass.station);
        if (st == nullptr) continue;
        const double available_bits = produced_before(pass.t_end) - allocated_bits;
        if (available_bits <= 0.0) continue;
        for (const auto& opt : detail::downlink_options(*st, scenario)) {
            ScheduleEntry probe;
            probe.kind = EntryKind::Downlink;
            probe.band = opt.band;
            probe.station = pass.station;
            const auto run = detail::longest_closed_run(pass, probe, scenario, link);
            if (!run || run->second - run->first < min_session_s) continue;

            ScheduleEntry entry = probe;
            entry.id = "dl-" + std::to_string(++seq) + "-" + pass.station;
            entry.t_start = run->first;
            entry.t_end = run->second;
            entry.devices = opt.devices;
            if (detail::placement_feasible(schedule, entry, scenario, passes, link)) {
                schedule.entries.push_back(entry);
                schedule.normalize();
                allocated_bits += std::min(available_bits,
                                           opt.rate_bps * (entry.t_end - entry.t_start));
                break;  // one session per pass
            }
            --seq;
        }
    }
}

/// Full planning pipeline: greedy experiment placement followed by downlink
/// insertion into closed-link passes.
inline PlanResult plan_greedy(const std::vector<ExperimentSpec>& requests,
                              const std::vector<PassWindow>& passes, const Scenario& scenario,
                              const LinkConfig& link = default_link_config()) {
    PlanResult result = plan_greedy_experiments(requests, passes, scenario, link);
    insert_downlinks(result.schedule, passes, scenario, link);
    return result;
}

struct ExhaustiveOptions {
    double quantum_s = 60.0;
    std::size_t max_requests = 4;
    std::size_t max_windows = 3;
    std::size_t node_budget = 2'000'000;
};

/// Brute-force placement oracle for small instances: tries every request
/// subset and every quantized start time, keeping the zero-violation
/// schedule that places the most requests (total priority breaks ties).
/// Returns nullopt when not even a single request can be placed.
inline std::optional<Schedule> plan_exhaustive(const std::vector<ExperimentSpec>& requests,
                                               const std::vector<PassWindow>& passes,
                                               const Scenario& scenario,
                                               const LinkConfig& link = default_link_config(),
                                               const ExhaustiveOptions& options = {}) {
    if (requests.size() > options.max_requests)
        throw Error("instance-too-large", "exhaustive planner accepts at most " +
                                              std::to_string(options.max_requests) + " requests");
    if (passes.size() > options.max_windows)
        throw Error("instance-too-large", "exhaustive planner accepts at most " +
                                              std::to_string(options.max_windows) + " windows");
    if (options.quantum_s < 60.0)
        throw Error("instance-too-large", "exhaustive planner requires quanta of 60 s or more");

    const std::vector<ExperimentSpec> ordered = detail::plan_order(requests);
    const double horizon = scenario.sim.duration_s;

    std::vector<std::vector<double>> candidates(ordered.size());
    double node_estimate = 1.0;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        const auto& req = ordered[i];
        const double latest_start = std::min(req.latest_end_s, horizon) - req.duration_s;
        for (double t = std::max(0.0, req.earliest_start_s); t <= latest_start + 1e-9;
             t += options.quantum_s)
            candidates[i].push_back(t);
        node_estimate *= static_cast<double>(candidates[i].size() + 1);
        if (node_estimate > static_cast<double>(options.node_budget))
            throw Error("instance-too-large", "candidate grid exceeds the search budget");
    }

    Schedule best;
    std::size_t best_count = 0;
    long long best_priority = 0;
    bool found = false;

    Schedule partial;
    std::size_t nodes = 0;

    auto dfs = [&](auto&& self, std::size_t idx, std::size_t count, long long priority) -> void {
        if (++nodes > options.node_budget)
            throw Error("instance-too-large", "search budget exhausted");
        if (idx == ordered.size()) {
            if (!found || count > best_count ||
                (count == best_count && priority > best_priority)) {
                best = partial;
                best_count = count;
                best_priority = priority;
                found = true;
            }
            return;
        }
        if (count + (ordered.size() - idx) < best_count) return;  // cannot catch up

        for (double t : candidates[idx]) {
            const ScheduleEntry entry = make_experiment_entry(ordered[idx], t, scenario);
            if (!detail::placement_feasible(partial, entry, scenario, passes, link)) continue;
            partial.entries.push_back(entry);
            self(self, idx + 1, count + 1, priority + ordered[idx].priority);
            partial.entries.pop_back();
        }
        self(self, idx + 1, count, priority);  // skip this request
    };
    dfs(dfs, 0, 0, 0);

    if (!found) return std::nullopt;
    if (best_count == 0 && !requests.empty()) return std::nullopt;
    best.normalize();
    return best;
}

} // namespace starsim
