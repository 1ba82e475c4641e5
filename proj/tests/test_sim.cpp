#include <catch2/catch_amalgamated.hpp>

#include <starsim/starsim.hpp>

#include "test_util.hpp"

using namespace starsim;
using Catch::Approx;

TEST_CASE("an empty schedule leaves the payload idle") {
    Scenario s = default_scenario();
    s.sim.duration_s = 5739.0;  // one orbit

    const Report r = run(s, Schedule{});

    for (const auto& e : r.events) {
        CHECK(e.kind != EventKind::ModeChange);
        CHECK(e.kind != EventKind::Overflow);
    }
    REQUIRE_FALSE(r.energy_trace.empty());
    for (const auto& sample : r.energy_trace) {
        CHECK(sample.soc_wh >= 0.0);
        CHECK(sample.soc_wh <= s.platform.battery_capacity_wh);
        CHECK(sample.load_w == 0.0);
    }
    CHECK(r.totals.produced_bits == 0);
    CHECK(r.duty_cycle.min_value == 0.0);
    CHECK(r.violations.empty());
}

TEST_CASE("a 600 s closed S-band pass moves 6.912e8 bits end to end") {
    const Scenario s = testutil::sband_volume_scenario();
    const Schedule sched = testutil::sband_volume_schedule(s);

    const auto passes =
        find_all_passes(s.orbit, s.stations, 0.0, s.sim.duration_s, s.sim.time_step_s);
    REQUIRE(validate(sched, s, passes).empty());

    const Report r = run(s, sched);

    const PassVolume* vol = nullptr;
    for (const auto& v : r.pass_volumes)
        if (v.station == "track-rf" && v.band == "L/S") vol = &v;
    REQUIRE(vol != nullptr);
    CHECK(static_cast<double>(vol->bits) == Approx(6.912e8).epsilon(0.001));

    CHECK(r.totals.produced_bits == 900'000'000ull);  // 3 Mbit/s for 300 s
    CHECK(r.totals.downlinked_bits == vol->bits);
    CHECK(r.totals.dropped_bits == 0);
    CHECK(r.totals.produced_bits ==
          r.totals.downlinked_bits + r.totals.dropped_bits + r.totals.remaining_bits);
}

TEST_CASE("halving the time step barely moves the pass volume") {
    Scenario coarse = testutil::sband_volume_scenario();
    Scenario fine = coarse;
    fine.sim.time_step_s = 5.0;

    const auto volume = [](const Scenario& s) {
        const Report r = run(s, testutil::sband_volume_schedule(s));
        for (const auto& v : r.pass_volumes)
            if (v.band == "L/S") return static_cast<double>(v.bits);
        return 0.0;
    };
    const double v10 = volume(coarse);
    const double v5 = volume(fine);
    REQUIRE(v10 > 0.0);
    CHECK(std::abs(v5 - v10) / v10 < 0.005);
}

TEST_CASE("the demo plan is step-size stable too") {
    const Scenario s =
        load_scenario(testutil::read_text(testutil::scenario_path("demo.json")));
    const auto passes =
        find_all_passes(s.orbit, s.stations, 0.0, s.sim.duration_s, s.sim.time_step_s);
    const Schedule sched = plan_greedy(s.experiments, passes, s).schedule;

    Scenario halved = s;
    halved.sim.time_step_s = 5.0;

    const Report coarse = run(s, sched);
    const Report fine = run(halved, sched);
    REQUIRE(coarse.pass_volumes.size() == fine.pass_volumes.size());
    for (std::size_t i = 0; i < coarse.pass_volumes.size(); ++i) {
        const double a = static_cast<double>(coarse.pass_volumes[i].bits);
        const double b = static_cast<double>(fine.pass_volumes[i].bits);
        if (a > 0.0) CHECK(std::abs(b - a) / a < 0.005);
    }
}

TEST_CASE("identical inputs give identical reports") {
    const Scenario s = testutil::sband_volume_scenario();
    const Schedule sched = testutil::sband_volume_schedule(s);
    const Report a = run(s, sched);
    const Report b = run(s, sched);
    CHECK(a == b);
    CHECK(emit_report_json(a) == emit_report_json(b));
}

TEST_CASE("events stay inside the horizon and in stable order") {
    const Scenario s = testutil::sband_volume_scenario();
    const Report r = run(s, testutil::sband_volume_schedule(s));
    REQUIRE_FALSE(r.events.empty());
    for (std::size_t i = 0; i < r.events.size(); ++i) {
        CHECK(r.events[i].t >= 0.0);
        CHECK(r.events[i].t <= s.sim.duration_s);
        if (i > 0) {
            const auto& prev = r.events[i - 1];
            const auto& cur = r.events[i];
            CHECK((prev.t < cur.t ||
                   (prev.t == cur.t &&
                    static_cast<int>(prev.kind) <= static_cast<int>(cur.kind))));
        }
    }
}

TEST_CASE("optical link events respect the terminal gates") {
    Scenario s = default_scenario();
    s.orbit.altitude_km = 400.0;  // slant sweeps 400 km (zenith) to 2294 km (horizon)
    s.sim.duration_s = 1200.0;
    s.sim.time_step_s = 2.0;
    s.experiments.clear();
    s.stations = {testutil::station_under_track(s, 600.0, "ogs", 0.0, {optical_band_label})};

    const Report r = run(s, Schedule{});
    int opens = 0;
    for (const auto& e : r.events) {
        if (e.kind != EventKind::LinkOpen && e.kind != EventKind::LinkClose) continue;
        if (e.kind == EventKind::LinkOpen) ++opens;
        const auto look =
            elevation_and_range(propagate(s.orbit, e.t), s.stations[0]);
        if (e.kind == EventKind::LinkOpen) {
            CHECK(look.slant_range_km >= 500.0);
            CHECK(look.slant_range_km <= 1500.0);
        }
    }
    CHECK(opens >= 1);  // the gate opens on approach (and again on departure)

    // A pointing error beyond the requirement keeps the link shut everywhere.
    s.optical.pointing_error_3sigma_deg = 1.5;
    const Report shut = run(s, Schedule{});
    for (const auto& e : shut.events) CHECK(e.kind != EventKind::LinkOpen);
}

TEST_CASE("violating schedules need force and carry their violations along") {
    Scenario s = default_scenario();
    s.experiments = {{"a", 1, {"FE1"}, false, 600.0, 0.0, 0.0, 0.0, 5000.0},
                     {"b", 1, {"FE2"}, false, 600.0, 0.0, 0.0, 0.0, 5000.0}};
    Schedule sched;
    sched.entries.push_back(make_experiment_entry(s.experiments[0], 0.0, s));
    sched.entries.push_back(make_experiment_entry(s.experiments[1], 100.0, s));  // same SDR

    CHECK_THROWS_MATCHES(run(s, sched), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == "schedule-invalid";
                         }));

    const Report forced = run(s, sched, default_link_config(), {true});
    REQUIRE_FALSE(forced.violations.empty());
    bool has_violation_event = false;
    for (const auto& e : forced.events)
        has_violation_event = has_violation_event || e.kind == EventKind::ViolationEvent;
    CHECK(has_violation_event);
}

TEST_CASE("run rejects ill-formed scenarios") {
    Scenario s = default_scenario();
    s.stations[0].min_elevation_deg = 95.0;
    CHECK_THROWS_MATCHES(run(s, Schedule{}), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == "invalid-scenario";
                         }));
}

TEST_CASE("reports round-trip through JSON") {
    const Scenario s = testutil::sband_volume_scenario();
    const Report r = run(s, testutil::sband_volume_schedule(s));
    const Report back = parse_report(emit_report_json(r));
    CHECK(back == r);
}

TEST_CASE("trace exports carry the fixed headers") {
    Scenario s = default_scenario();
    s.sim.duration_s = 600.0;
    const Report r = run(s, Schedule{});

    const auto energy = emit_energy_csv(r);
    CHECK(energy.rfind("t_s,soc_wh,generation_w,load_w\n", 0) == 0);
    const auto storage = emit_storage_csv(r);
    CHECK(storage.rfind("t_s,used_bits\n", 0) == 0);

    const auto files = emit_report(r, "csv");
    CHECK(files.count("report_energy.csv") == 1);
    CHECK(files.count("report_storage.csv") == 1);
    CHECK(emit_report(r, "json").count("report.json") == 1);
    CHECK_THROWS_MATCHES(emit_report(r, "xml"), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == "unsupported-format";
                         }));

    // An empty timeline still renders as valid JSON with empty arrays.
    Report blank;
    const auto doc = nlohmann::ordered_json::parse(emit_report_json(blank));
    CHECK(doc.at("events").is_array());
    CHECK(doc.at("events").empty());
    CHECK(doc.at("energy_trace").empty());
}

TEST_CASE("schedules round-trip through JSON") {
    const Scenario s = testutil::sband_volume_scenario();
    const Schedule sched = testutil::sband_volume_schedule(s);
    const Schedule back = parse_schedule(emit_schedule(sched));
    REQUIRE(back.entries.size() == sched.entries.size());
    for (std::size_t i = 0; i < back.entries.size(); ++i) {
        CHECK(back.entries[i].id == sched.entries[i].id);
        CHECK(back.entries[i].kind == sched.entries[i].kind);
        CHECK(back.entries[i].t_start == sched.entries[i].t_start);
        CHECK(back.entries[i].t_end == sched.entries[i].t_end);
        CHECK(back.entries[i].devices == sched.entries[i].devices);
        CHECK(back.entries[i].band == sched.entries[i].band);
        CHECK(back.entries[i].station == sched.entries[i].station);
    }
    CHECK_THROWS_MATCHES(parse_schedule("nope"), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == "parse"; }));
}

TEST_CASE("depletion shows up in the report timeline") {
    Scenario s = default_scenario();
    s.platform.battery_capacity_wh = 1.0;
    s.generation.sunlit_power_w = 0.0;
    s.sim.duration_s = 2000.0;
    s.experiments = {{"drain", 1, {"FE4"}, false, 1900.0, 0.0, 0.0, 0.0, 2000.0}};

    Schedule sched;
    sched.entries.push_back(make_experiment_entry(s.experiments[0], 0.0, s));
    const Report r = run(s, sched);

    bool depleted = false;
    for (const auto& e : r.events) depleted = depleted || e.kind == EventKind::Depletion;
    CHECK(depleted);
    CHECK(r.energy_trace.back().soc_wh == 0.0);
}
