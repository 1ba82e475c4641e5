#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <starsim/starsim.hpp>

using namespace starsim;

TEST_CASE("baseline scenario carries the platform figures") {
    const Scenario s = default_scenario();

    CHECK(s.platform.data_storage_bits == 1'600'000'000'000ull);  // 200 GB
    CHECK(s.platform.supply_nominal_w == 45.0);
    CHECK(s.platform.supply_peak_w == 85.0);
    CHECK(s.platform.payload_peak_power_ceiling_w == 160.0);
    CHECK(s.platform.battery_capacity_wh == 42.0);
    CHECK(s.platform.ttc_downlink_rate_bps == 5e6);
    CHECK(s.platform.duty_cycle_floor == 0.15);
    CHECK(s.platform.lifetime_years == 3.0);

    CHECK(s.optical.range_min_km == 500.0);
    CHECK(s.optical.range_max_km == 1500.0);
    CHECK(s.optical.pointing_requirement_3sigma_deg == 1.0);
    CHECK(s.optical.downlink_max_rate_bps == 1e9);
    CHECK(s.optical.uplink_max_rate_bps == 100e6);
    CHECK(s.optical.standby_power_w == 4.0);
    CHECK(s.optical.peak_power_w == 25.0);
    CHECK(s.optical.downlink_wavelength_nm == 1530.0);
    CHECK(s.optical.uplink_wavelength_nm == 1560.0);

    REQUIRE(s.sdrs.size() == 2);
    for (const auto& sdr : s.sdrs) {
        CHECK(sdr.standby_power_w == 10.0);
        CHECK(sdr.active_power_w == 30.0);
        CHECK(sdr.slots.size() == 2);
    }

    REQUIRE(s.frontends.size() == 4);
    CHECK(s.find_frontend("FE1")->max_gross_rate_bps == 50e3);
    CHECK(s.find_frontend("FE2")->max_gross_rate_bps == 1.152e6);
    CHECK(s.find_frontend("FE3")->max_gross_rate_bps == 2.3e6);
    CHECK(s.find_frontend("FE4")->max_gross_rate_bps == 4.6e6);
    CHECK(s.find_frontend("FE1")->antenna_gain_dbi == 3.0);
    CHECK(s.find_frontend("FE2")->antenna_gain_dbi == 10.0);
    CHECK(s.find_frontend("FE3")->antenna_gain_dbi == 11.0);
    CHECK(s.find_frontend("FE4")->antenna_gain_dbi == 11.0);
    CHECK(s.find_frontend("FE1")->ranges.size() == 3);
    CHECK(s.find_frontend("FE2")->ranges.size() == 2);
    CHECK(s.find_frontend("FE2")->link_range().center_hz() == 2180e6);
    CHECK(s.find_frontend("FE4")->ranges[0].low_hz == 19.30e9);

    CHECK(s.orbit.altitude_km == 550.0);
    CHECK(s.orbit.inclination_deg == 97.6);

    CHECK(s.host_sdr("FE1")->id == "Minerva-A");
    CHECK(s.host_sdr("FE2")->id == "Minerva-A");
    CHECK(s.host_sdr("FE3")->id == "Minerva-B");
    CHECK(s.host_sdr("FE4")->id == "Minerva-B");

    CHECK(validate_scenario(s).empty());
}

TEST_CASE("empty document loads the baseline") {
    const Scenario loaded = load_scenario("{}");
    CHECK(emit_scenario(loaded) == emit_scenario(default_scenario()));
}

TEST_CASE("partial document overrides only what it names") {
    const Scenario loaded = load_scenario(R"({"platform": {"battery_capacity_wh": 120}})");
    CHECK(loaded.platform.battery_capacity_wh == 120.0);

    Scenario expected = default_scenario();
    expected.platform.battery_capacity_wh = 120.0;
    CHECK(emit_scenario(loaded) == emit_scenario(expected));
}

TEST_CASE("unknown keys are rejected") {
    CHECK_THROWS_MATCHES(load_scenario(R"({"platform": {"warp_drive": 9}})"), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == "schema"; }));
    CHECK_THROWS_MATCHES(load_scenario(R"({"hyperdrive": {}})"), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == "schema"; }));
}

TEST_CASE("malformed and mistyped documents are rejected") {
    CHECK_THROWS_MATCHES(load_scenario("not json"), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == "parse"; }));
    CHECK_THROWS_MATCHES(load_scenario(R"({"platform": {"battery_capacity_wh": "many"}})"),
                         Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == "schema";
                         }));
    CHECK_THROWS_MATCHES(load_scenario(R"({"sim": {"seed": 1.5}})"), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == "schema"; }));
}

TEST_CASE("dangling front-end references fail to load") {
    const std::string doc = R"({
        "sdrs": [
            {"id": "Minerva-A", "slots": ["FE1", "FE9"]},
            {"id": "Minerva-B", "slots": ["FE3", "FE4"]}
        ]
    })";
    CHECK_THROWS_MATCHES(load_scenario(doc), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == "reference"; }));

    const std::string doc2 = R"({
        "experiments": [
            {"id": "x", "frontends": ["FE9"], "duration_s": 10,
             "earliest_start_s": 0, "latest_end_s": 100}
        ]
    })";
    CHECK_THROWS_MATCHES(load_scenario(doc2), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == "reference"; }));
}

TEST_CASE("loader normalizes orbit angles") {
    const Scenario s = load_scenario(R"({"orbit": {"raan_deg": 400, "true_anomaly_deg": -30}})");
    CHECK(s.orbit.raan_deg == Catch::Approx(40.0));
    CHECK(s.orbit.true_anomaly_deg == Catch::Approx(330.0));
    CHECK(validate_scenario(s).empty());
}

namespace {

bool has_issue(const std::vector<Issue>& issues, const std::string& code) {
    for (const auto& i : issues)
        if (i.code == code) return true;
    return false;
}

} // namespace

TEST_CASE("validate_scenario reports invariant breaches") {
    Scenario s = default_scenario();

    SECTION("elevation out of range") {
        s.stations[0].min_elevation_deg = 95.0;
        CHECK(has_issue(validate_scenario(s), "elevation-out-of-range"));
    }
    SECTION("dangling slot reference") {
        s.sdrs[0].slots[1] = "FE9";
        CHECK(has_issue(validate_scenario(s), "dangling-frontend"));
    }
    SECTION("supply ordering") {
        s.platform.supply_nominal_w = 90.0;
        CHECK(has_issue(validate_scenario(s), "supply-order"));
    }
    SECTION("duty floor range") {
        s.platform.duty_cycle_floor = 1.5;
        CHECK(has_issue(validate_scenario(s), "duty-floor-range"));
    }
    SECTION("frequency range order and overlap") {
        s.frontends[0].ranges[0] = {434e6, 433e6};
        CHECK(has_issue(validate_scenario(s), "range-order"));
        s = default_scenario();
        s.frontends[0].ranges[1] = {433.5e6, 870e6};
        CHECK(has_issue(validate_scenario(s), "range-overlap"));
    }
    SECTION("standby versus active power") {
        s.sdrs[0].standby_power_w = 40.0;
        CHECK(has_issue(validate_scenario(s), "standby-exceeds-active"));
    }
    SECTION("experiment window") {
        s.experiments.push_back({"bad", 0, {}, false, 100.0, 0.0, 0.0, 50.0, 20.0});
        CHECK(has_issue(validate_scenario(s), "experiment-window"));
    }
    SECTION("time step") {
        s.sim.time_step_s = 0.0;
        CHECK(has_issue(validate_scenario(s), "time-step"));
    }
}

namespace {

Scenario random_scenario(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Scenario s = default_scenario();
    s.platform.battery_capacity_wh = 42.0 + 78.0 * u(rng);
    s.platform.supply_nominal_w = 30.0 + 15.0 * u(rng);
    s.platform.duty_cycle_floor = 0.05 + 0.4 * u(rng);
    s.orbit.altitude_km = 400.0 + 400.0 * u(rng);
    s.orbit.inclination_deg = 360.0 * u(rng);
    s.orbit.raan_deg = 360.0 * u(rng);
    s.frontends[1].max_gross_rate_bps = io_detail::mbps_to_bps(2.0 * u(rng) + 0.001);
    s.stations[0].latitude_deg = -90.0 + 180.0 * u(rng);
    s.stations[0].min_elevation_deg = 45.0 * u(rng);
    s.generation.sunlit_power_w = 7.0 + 13.0 * u(rng);
    s.generation.eclipse_modeled = u(rng) < 0.5;
    s.sim.duration_s = 3600.0 + 20000.0 * u(rng);
    s.sim.time_step_s = 1.0 + 29.0 * u(rng);
    s.sim.seed = rng();
    const int n_exp = static_cast<int>(u(rng) * 3);
    s.experiments.clear();
    for (int i = 0; i < n_exp; ++i) {
        ExperimentSpec e;
        e.id = "exp-" + std::to_string(i);
        e.priority = static_cast<int>(u(rng) * 10);
        e.required_frontends = {"FE" + std::to_string(1 + static_cast<int>(u(rng) * 4))};
        e.duration_s = 60.0 + 600.0 * u(rng);
        e.extra_power_w = 20.0 * u(rng);
        e.data_production_rate_bps = io_detail::mbps_to_bps(u(rng));
        e.earliest_start_s = u(rng) * 1000.0;
        e.latest_end_s = e.earliest_start_s + e.duration_s + u(rng) * 2000.0;
        s.experiments.push_back(e);
    }
    return s;
}

} // namespace

TEST_CASE("emit/load round-trip is the identity") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const Scenario s = random_scenario(rng);
        REQUIRE(validate_scenario(s).empty());
        const std::string doc = emit_scenario(s);
        const Scenario back = load_scenario(doc);
        REQUIRE(emit_scenario(back) == doc);
        CHECK(back.platform.battery_capacity_wh == s.platform.battery_capacity_wh);
        CHECK(back.platform.data_storage_bits == s.platform.data_storage_bits);
        CHECK(back.frontends[1].max_gross_rate_bps == s.frontends[1].max_gross_rate_bps);
        CHECK(back.sim.seed == s.sim.seed);
        CHECK(back.sim.duration_s == s.sim.duration_s);
        CHECK(back.experiments.size() == s.experiments.size());
    }
}

TEST_CASE("every loaded scenario honors the type invariants") {
    // Randomized valid documents: the loader's output must self-validate.
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        auto doc = nlohmann::ordered_json::object();
        if (u(rng) < 0.7)
            doc["platform"] = {{"battery_capacity_wh", 42.0 + 78.0 * u(rng)},
                               {"supply_nominal_w", 20.0 + 25.0 * u(rng)}};
        if (u(rng) < 0.7)
            doc["orbit"] = {{"altitude_km", 300.0 + 700.0 * u(rng)},
                            {"inclination_deg", 720.0 * u(rng) - 360.0}};
        if (u(rng) < 0.5)
            doc["sim"] = {{"duration_s", 600.0 + 10000.0 * u(rng)},
                          {"step_s", 1.0 + 9.0 * u(rng)}};
        if (u(rng) < 0.5)
            doc["generation"] = {{"sunlit_power_w", 7.0 + 13.0 * u(rng)},
                                 {"eclipse_modeled", u(rng) < 0.5}};
        if (u(rng) < 0.4) {
            doc["stations"] = nlohmann::ordered_json::array();
            const int n = 1 + static_cast<int>(u(rng) * 3.0);
            for (int i = 0; i < n; ++i)
                doc["stations"].push_back(
                    {{"name", "gs-" + std::to_string(i)},
                     {"latitude_deg", -90.0 + 180.0 * u(rng)},
                     {"longitude_deg", -180.0 + 360.0 * u(rng)},
                     {"min_elevation_deg", 80.0 * u(rng)},
                     {"bands", nlohmann::ordered_json::array({"UHF", "optical"})}});
        }
        if (u(rng) < 0.4) {
            doc["experiments"] = nlohmann::ordered_json::array();
            const int n = 1 + static_cast<int>(u(rng) * 3.0);
            for (int i = 0; i < n; ++i) {
                const double earliest = 1000.0 * u(rng);
                const double duration = 60.0 + 600.0 * u(rng);
                doc["experiments"].push_back(
                    {{"id", "e-" + std::to_string(i)},
                     {"priority", static_cast<int>(u(rng) * 10.0)},
                     {"frontends",
                      nlohmann::ordered_json::array(
                          {"FE" + std::to_string(1 + static_cast<int>(u(rng) * 4.0))})},
                     {"duration_s", duration},
                     {"data_rate_mbps", 2.0 * u(rng)},
                     {"earliest_start_s", earliest},
                     {"latest_end_s", earliest + duration + 1000.0 * u(rng)}});
            }
        }
        const Scenario s = load_scenario(doc.dump());
        CHECK(validate_scenario(s).empty());
    }
}
