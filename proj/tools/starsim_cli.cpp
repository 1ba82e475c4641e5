// Command-line surface for the mission-operations toolkit: pass prediction,
// link budgets, experiment scheduling, simulation and scenario validation.
//
// Exit codes: 0 success, 1 domain outcome (open violations, skipped requests,
// link not closed, validation issues), 2 usage/configuration/input errors.
// Machine-readable output goes to --out targets; stdout carries human text.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <starsim/starsim.hpp>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw starsim::Error("io", "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw starsim::Error("io", "cannot write " + path.string());
    out << content;
}

starsim::Scenario load_scenario_file(const std::string& path,
                                     std::optional<std::uint64_t> seed_override) {
    auto scenario = starsim::load_scenario(read_file(path));
    if (seed_override) scenario.sim.seed = *seed_override;
    return scenario;
}

/// Loads and insists the scenario is well-formed; issues are fatal here.
starsim::Scenario load_valid_scenario(const std::string& path,
                                      std::optional<std::uint64_t> seed_override) {
    auto scenario = load_scenario_file(path, seed_override);
    const auto issues = starsim::validate_scenario(scenario);
    if (!issues.empty()) {
        std::ostringstream msg;
        msg << path << " has " << issues.size() << " issue(s); first: " << issues.front().code
            << " at " << issues.front().path;
        throw starsim::Error("invalid-scenario", msg.str());
    }
    return scenario;
}

std::string fmt_mbps(double bps) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f Mbit/s", bps / 1e6);
    return buf;
}

std::string fmt_time(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", t);
    return buf;
}

// ---------------------------------------------------------------------------
// passes
// ---------------------------------------------------------------------------

struct PassesArgs {
    std::string scenario_path;
    double hours = 24.0;
    std::string station;
    double step_s = 10.0;
    std::string out_path;
};

int cmd_passes(const PassesArgs& args, std::optional<std::uint64_t> seed) {
    const auto scenario = load_valid_scenario(args.scenario_path, seed);

    std::vector<starsim::GroundStation> stations = scenario.stations;
    if (!args.station.empty()) {
        const auto* st = scenario.find_station(args.station);
        if (st == nullptr)
            throw starsim::Error("unknown-station", "no station named " + args.station);
        stations = {*st};
    }

    std::vector<starsim::PassWindow> passes;
    if (args.hours > 0.0)
        passes = starsim::find_all_passes(scenario.orbit, stations, 0.0, args.hours * 3600.0,
                                          args.step_s);

    std::printf("%-14s %10s %10s %8s %8s %10s\n", "station", "start_s", "end_s", "dur_s",
                "max_el", "min_km");
    ordered_json out = ordered_json::array();
    for (const auto& p : passes) {
        double min_slant = p.samples.empty() ? 0.0 : p.samples.front().slant_range_km;
        for (const auto& g : p.samples) min_slant = std::min(min_slant, g.slant_range_km);
        std::printf("%-14s %10.1f %10.1f %8.1f %7.1f° %10.1f\n", p.station.c_str(),
                    p.t_start, p.t_end, p.t_end - p.t_start, p.max_elevation_deg, min_slant);
        out.push_back({{"station", p.station},
                       {"t_start_s", p.t_start},
                       {"t_end_s", p.t_end},
                       {"duration_s", p.t_end - p.t_start},
                       {"max_elevation_deg", p.max_elevation_deg},
                       {"min_slant_km", min_slant}});
    }
    std::printf("%zu pass(es) over %.1f h\n", passes.size(), args.hours);
    if (!args.out_path.empty()) write_file(args.out_path, out.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// linkbudget
// ---------------------------------------------------------------------------

struct LinkBudgetArgs {
    std::string band;
    double range_km = 0.0;
    double pointing_deg = -1.0;  // <0: use the scenario default
    std::optional<double> tx_power_dbw, tx_gain_dbi, rx_gain_dbi, losses_db, gt_dbk,
        required_cn0_dbhz, required_margin_db;
    std::string out_path;
};

int cmd_linkbudget(const LinkBudgetArgs& args) {
    const auto scenario = starsim::default_scenario();
    ordered_json out;
    starsim::LinkAssessment a;

    if (args.band == "optical-down" || args.band == "optical-up") {
        const auto dir = args.band == "optical-down" ? starsim::OpticalDirection::Down
                                                     : starsim::OpticalDirection::Up;
        const double pointing = args.pointing_deg >= 0.0
                                    ? args.pointing_deg
                                    : scenario.optical.pointing_error_3sigma_deg;
        a = starsim::optical_assess(scenario.optical, args.range_km, pointing, dir);
        std::printf("optical %s at %.1f km, pointing %.2f° (3σ)\n",
                    args.band == "optical-down" ? "downlink" : "uplink", args.range_km,
                    pointing);
        std::printf("  range gate    : [%.0f, %.0f] km -> %s\n", scenario.optical.range_min_km,
                    scenario.optical.range_max_km,
                    a.limiting_factor == "range" ? "FAIL" : "ok");
        std::printf("  pointing gate : <= %.2f° -> %s\n",
                    scenario.optical.pointing_requirement_3sigma_deg,
                    a.limiting_factor == "pointing" ? "FAIL" : "ok");
        out = {{"band", args.band},
               {"slant_range_km", args.range_km},
               {"pointing_error_3sigma_deg", pointing},
               {"closed", a.closed},
               {"limiting_factor", a.limiting_factor},
               {"achievable_rate_bps", a.achievable_rate_bps}};
    } else {
        const auto band = starsim::parse_band(args.band);
        const starsim::FrontEnd* fe = band ? scenario.frontend_for_band(*band) : nullptr;
        if (fe == nullptr)
            throw starsim::Error("unknown-band", "no such band: " + args.band);
        auto params = starsim::params_for_band(starsim::default_link_config(),
                                               starsim::band_label(*band));
        if (args.tx_power_dbw) params.tx_power_dbw = *args.tx_power_dbw;
        if (args.tx_gain_dbi) params.tx_gain_dbi = *args.tx_gain_dbi;
        if (args.rx_gain_dbi) params.rx_gain_dbi = *args.rx_gain_dbi;
        if (args.losses_db) params.system_losses_db = *args.losses_db;
        if (args.gt_dbk) params.rx_figure_of_merit_db_k = *args.gt_dbk;
        if (args.required_cn0_dbhz) params.required_cn0_dbhz = *args.required_cn0_dbhz;
        if (args.required_margin_db) params.required_margin_db = *args.required_margin_db;

        const double f_center = fe->link_range().center_hz();
        const double fspl = starsim::fspl_db(f_center, args.range_km);
        a = starsim::rf_assess(*fe, params, args.range_km);
        std::printf("%s (%s) at %.1f km, %.2f MHz center\n", starsim::band_label(*band).c_str(),
                    fe->id.c_str(), args.range_km, f_center / 1e6);
        std::printf("  FSPL          : %.2f dB\n", fspl);
        std::printf("  margin        : %.2f dB (requires %.2f dB)\n", a.margin_db,
                    params.required_margin_db);
        out = {{"band", starsim::band_label(*band)},
               {"slant_range_km", args.range_km},
               {"center_frequency_hz", f_center},
               {"fspl_db", fspl},
               {"margin_db", a.margin_db},
               {"closed", a.closed},
               {"limiting_factor", a.limiting_factor},
               {"achievable_rate_bps", a.achievable_rate_bps}};
    }

    std::printf("  verdict       : %s\n", a.closed ? "CLOSED" : "NOT CLOSED");
    std::printf("  rate          : %s\n", fmt_mbps(a.achievable_rate_bps).c_str());
    if (!a.closed) std::printf("  limiting      : %s\n", a.limiting_factor.c_str());
    if (!args.out_path.empty()) write_file(args.out_path, out.dump(2) + "\n");
    return a.closed ? 0 : 1;
}

// ---------------------------------------------------------------------------
// schedule
// ---------------------------------------------------------------------------

struct ScheduleArgs {
    std::string scenario_path;
    std::string out_path;
};

int cmd_schedule(const ScheduleArgs& args, std::optional<std::uint64_t> seed) {
    const auto scenario = load_valid_scenario(args.scenario_path, seed);

    bool any_flatsat_failure = false;
    std::vector<starsim::ExperimentSpec> cleared;
    for (const auto& exp : scenario.experiments) {
        const auto findings = starsim::flatsat_check(exp, scenario);
        if (findings.empty()) {
            cleared.push_back(exp);
            continue;
        }
        any_flatsat_failure = true;
        for (const auto& f : findings)
            std::printf("flatsat %-18s %s: %s\n", f.code.c_str(), exp.id.c_str(),
                        f.message.c_str());
    }

    const auto passes = starsim::find_all_passes(scenario.orbit, scenario.stations, 0.0,
                                                 scenario.sim.duration_s,
                                                 scenario.sim.time_step_s);
    const auto plan = starsim::plan_greedy(cleared, passes, scenario);

    for (const auto& e : plan.schedule.entries)
        std::printf("placed  %-20s [%s, %s) band=%s\n", e.id.c_str(), fmt_time(e.t_start).c_str(),
                    fmt_time(e.t_end).c_str(), e.band.c_str());
    for (const auto& sk : plan.skipped)
        std::printf("skipped %-20s reason=%s\n", sk.id.c_str(), sk.reason.c_str());

    const auto duty = starsim::duty_cycle(
        plan.schedule, starsim::orbital_period(scenario.orbit.altitude_km),
        scenario.sim.duration_s);
    std::printf("duty cycle per orbit:");
    for (double d : duty.per_orbit) std::printf(" %.4f", d);
    std::printf(" (min %.4f, floor %.2f)\n", duty.min_value, scenario.platform.duty_cycle_floor);

    if (!args.out_path.empty())
        write_file(args.out_path, starsim::emit_schedule(plan.schedule) + "\n");

    return (any_flatsat_failure || !plan.skipped.empty()) ? 1 : 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::vector<std::string> scenario_paths;
    std::string schedule_path;
    std::string format = "json";
    std::string out_dir;
    bool force = false;
    unsigned jobs = 1;
};

struct SimOutcome {
    int code = 2;
    std::string text;
};

SimOutcome simulate_one(const std::string& scenario_path, const SimulateArgs& args,
                        std::optional<std::uint64_t> seed, const fs::path& out_dir) {
    SimOutcome outcome;
    std::ostringstream msg;
    try {
        const auto scenario = load_valid_scenario(scenario_path, seed);
        const auto passes = starsim::find_all_passes(scenario.orbit, scenario.stations, 0.0,
                                                     scenario.sim.duration_s,
                                                     scenario.sim.time_step_s);
        starsim::Schedule schedule;
        if (!args.schedule_path.empty()) {
            schedule = starsim::parse_schedule(read_file(args.schedule_path));
        } else {
            schedule = starsim::plan_greedy(scenario.experiments, passes, scenario).schedule;
        }

        const auto violations = starsim::validate(schedule, scenario, passes);
        if (!violations.empty() && !args.force) {
            msg << scenario_path << ": schedule has " << violations.size()
                << " violation(s); first: " << violations.front().code << " at t="
                << fmt_time(violations.front().t) << " (" << violations.front().detail
                << "); rerun with --force to simulate anyway\n";
            outcome.code = 1;
            outcome.text = msg.str();
            return outcome;
        }

        const auto report =
            starsim::run(scenario, schedule, starsim::default_link_config(), {args.force});
        if (!args.out_dir.empty()) {
            for (const auto& [name, content] : starsim::emit_report(report, args.format))
                write_file(out_dir / name, content);
        }

        msg << scenario_path << ": digest " << report.scenario_digest << ", "
            << report.events.size() << " events, duty min "
            << fmt_time(report.duty_cycle.min_value * 100.0) << "%, produced "
            << report.totals.produced_bits << " bits, downlinked "
            << report.totals.downlinked_bits << ", dropped " << report.totals.dropped_bits
            << ", " << report.violations.size() << " violation(s)\n";
        outcome.code = report.violations.empty() ? 0 : 1;
    } catch (const starsim::Error& e) {
        msg << scenario_path << ": " << e.code() << ": " << e.what() << "\n";
        outcome.code = 2;
    } catch (const std::exception& e) {
        msg << scenario_path << ": " << e.what() << "\n";
        outcome.code = 2;
    }
    outcome.text = msg.str();
    return outcome;
}

int cmd_simulate(const SimulateArgs& args, std::optional<std::uint64_t> seed) {
    const bool multi = args.scenario_paths.size() > 1;
    std::vector<SimOutcome> outcomes(args.scenario_paths.size());

    auto out_dir_for = [&](const std::string& path) -> fs::path {
        fs::path base = args.out_dir.empty() ? fs::path(".") : fs::path(args.out_dir);
        return multi ? base / fs::path(path).stem() : base;
    };

    const unsigned jobs = std::max(1u, args.jobs);
    if (jobs == 1 || args.scenario_paths.size() == 1) {
        for (std::size_t i = 0; i < args.scenario_paths.size(); ++i)
            outcomes[i] = simulate_one(args.scenario_paths[i], args, seed,
                                       out_dir_for(args.scenario_paths[i]));
    } else {
        std::mutex next_mutex;
        std::size_t next = 0;
        auto worker = [&]() {
            for (;;) {
                std::size_t i;
                {
                    std::lock_guard lock(next_mutex);
                    if (next >= args.scenario_paths.size()) return;
                    i = next++;
                }
                outcomes[i] = simulate_one(args.scenario_paths[i], args, seed,
                                           out_dir_for(args.scenario_paths[i]));
            }
        };
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < std::min<std::size_t>(jobs, args.scenario_paths.size()); ++k)
            pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    int rc = 0;
    for (const auto& o : outcomes) {
        std::fputs(o.text.c_str(), stdout);
        rc = std::max(rc, o.code);
    }
    return rc;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

int cmd_validate(const std::string& scenario_path, std::optional<std::uint64_t> seed) {
    const auto scenario = load_scenario_file(scenario_path, seed);
    const auto issues = starsim::validate_scenario(scenario);
    for (const auto& issue : issues)
        std::printf("%-24s %-28s %s\n", issue.code.c_str(), issue.path.c_str(),
                    issue.message.c_str());
    std::printf("%zu issue(s)\n", issues.size());
    return issues.empty() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mission-operations simulator for a multi-band 6U CubeSat"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::optional<std::uint64_t> seed;
    app.add_option("--seed", seed, "Override the scenario RNG seed")->expected(1);

    PassesArgs passes_args;
    auto* passes_cmd = app.add_subcommand("passes", "Predict ground-station passes");
    passes_cmd->add_option("--scenario", passes_args.scenario_path, "Scenario file")->required();
    passes_cmd->add_option("--hours", passes_args.hours, "Horizon in hours");
    passes_cmd->add_option("--station", passes_args.station, "Restrict to one station");
    passes_cmd->add_option("--step", passes_args.step_s, "Sampling step in seconds");
    passes_cmd->add_option("--out", passes_args.out_path, "Write the pass list as JSON");

    LinkBudgetArgs lb_args;
    auto* lb_cmd = app.add_subcommand("linkbudget", "Assess one link at a slant range");
    lb_cmd->add_option("--band", lb_args.band, "uhf|s|x|ka|optical-down|optical-up")->required();
    lb_cmd->add_option("--range-km", lb_args.range_km, "Slant range in km")->required();
    lb_cmd->add_option("--pointing-deg", lb_args.pointing_deg, "Achieved pointing, 3-sigma deg");
    lb_cmd->add_option("--tx-power-dbw", lb_args.tx_power_dbw, "Transmit power");
    lb_cmd->add_option("--tx-gain-dbi", lb_args.tx_gain_dbi, "Transmit antenna gain");
    lb_cmd->add_option("--rx-gain-dbi", lb_args.rx_gain_dbi, "Extra receive gain");
    lb_cmd->add_option("--losses-db", lb_args.losses_db, "System losses");
    lb_cmd->add_option("--gt-dbk", lb_args.gt_dbk, "Receiver figure of merit G/T");
    lb_cmd->add_option("--required-cn0-dbhz", lb_args.required_cn0_dbhz, "Required C/N0");
    lb_cmd->add_option("--required-margin-db", lb_args.required_margin_db, "Required margin");
    lb_cmd->add_option("--out", lb_args.out_path, "Write the assessment as JSON");

    ScheduleArgs sched_args;
    auto* sched_cmd = app.add_subcommand("schedule", "Plan experiments and downlinks");
    sched_cmd->add_option("--scenario", sched_args.scenario_path, "Scenario file")->required();
    sched_cmd->add_option("--out", sched_args.out_path, "Write the schedule as JSON");

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "Run the mission simulation");
    sim_cmd->add_option("--scenario", sim_args.scenario_paths, "Scenario file(s)")->required();
    sim_cmd->add_option("--schedule", sim_args.schedule_path,
                        "Schedule file (auto-planned when omitted)");
    sim_cmd->add_option("--format", sim_args.format, "Report format: json|csv");
    sim_cmd->add_option("--out", sim_args.out_dir, "Output directory for report files");
    sim_cmd->add_flag("--force", sim_args.force, "Simulate despite schedule violations");
    sim_cmd->add_option("--jobs", sim_args.jobs, "Concurrent scenario runs");

    std::string validate_path;
    auto* val_cmd = app.add_subcommand("validate", "Check a scenario file");
    val_cmd->add_option("--scenario", validate_path, "Scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (passes_cmd->parsed()) return cmd_passes(passes_args, seed);
        if (lb_cmd->parsed()) return cmd_linkbudget(lb_args);
        if (sched_cmd->parsed()) return cmd_schedule(sched_args, seed);
        if (sim_cmd->parsed()) return cmd_simulate(sim_args, seed);
        if (val_cmd->parsed()) return cmd_validate(validate_path, seed);
    } catch (const starsim::Error& e) {
        std::fprintf(stderr, "error (%s): %s\n", e.code().c_str(), e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
