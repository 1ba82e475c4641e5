#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "starsim/error.hpp"
#include "starsim/scenario.hpp"

namespace starsim {

namespace io_detail {

using ojson = nlohmann::ordered_json;

inline void check_keys(const ojson& obj, const std::string& path,
                       const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key))
            throw Error("schema", path + ": unknown key \"" + key + "\"");
    }
}

inline const ojson* member(const ojson& obj, const std::string& key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

inline double as_number(const ojson& j, const std::string& path) {
    if (!j.is_number()) throw Error("schema", path + ": expected a number");
    return j.get<double>();
}

inline bool as_bool(const ojson& j, const std::string& path) {
    if (!j.is_boolean()) throw Error("schema", path + ": expected a boolean");
    return j.get<bool>();
}

inline std::string as_string(const ojson& j, const std::string& path) {
    if (!j.is_string()) throw Error("schema", path + ": expected a string");
    return j.get<std::string>();
}

inline void load_number(const ojson& obj, const std::string& key, const std::string& path,
                        double& target) {
    if (const ojson* j = member(obj, key)) target = as_number(*j, path + "." + key);
}

inline void load_bool(const ojson& obj, const std::string& key, const std::string& path,
                      bool& target) {
    if (const ojson* j = member(obj, key)) target = as_bool(*j, path + "." + key);
}

inline void load_string(const ojson& obj, const std::string& key, const std::string& path,
                        std::string& target) {
    if (const ojson* j = member(obj, key)) target = as_string(*j, path + "." + key);
}

inline double require_number(const ojson& obj, const std::string& key, const std::string& path) {
    const ojson* j = member(obj, key);
    if (j == nullptr) throw Error("schema", path + ": missing required key \"" + key + "\"");
    return as_number(*j, path + "." + key);
}

inline std::string require_string(const ojson& obj, const std::string& key,
                                  const std::string& path) {
    const ojson* j = member(obj, key);
    if (j == nullptr) throw Error("schema", path + ": missing required key \"" + key + "\"");
    return as_string(*j, path + "." + key);
}

// Unit conversions used by the document schema. Converted quantities are
// rounded to their integral internal grain (Hz, bit/s, bits) so that
// emit/load round-trips are exact.
inline double mbps_to_bps(double mbps) { return std::llround(mbps * 1e6); }
inline double mhz_to_hz(double mhz) { return std::llround(mhz * 1e6); }
inline std::uint64_t gb_to_bits(double gb) {
    return static_cast<std::uint64_t>(std::llround(gb * 8e9));
}

inline double normalize_angle(double deg) {
    double a = std::fmod(deg, 360.0);
    if (a < 0.0) a += 360.0;
    return a;
}

} // namespace io_detail

/// Parses a scenario document. Omitted fields take their baseline values;
/// list sections (sdrs, frontends, stations, experiments), when present,
/// replace the baseline list wholesale. Unknown keys, type mismatches and
/// dangling references are errors.
inline Scenario load_scenario(const std::string& text) {
    using namespace io_detail;

    ojson doc;
    try {
        doc = ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("parse", std::string("scenario document: ") + e.what());
    }
    if (!doc.is_object()) throw Error("parse", "scenario document must be a JSON object");

    check_keys(doc, "scenario",
               {"platform", "orbit", "sdrs", "frontends", "optical", "stations", "experiments",
                "generation", "sim"});

    Scenario s = default_scenario();

    if (const ojson* p = member(doc, "platform")) {
        const std::string path = "platform";
        check_keys(*p, path,
                   {"form_factor", "payload_mass_limit_kg", "payload_volume_limit_u",
                    "avg_power_min_w", "avg_power_max_w", "payload_peak_power_ceiling_w",
                    "supply_nominal_w", "supply_peak_w", "battery_capacity_wh",
                    "data_storage_gb", "ttc_rate_mbps", "duty_cycle_floor", "lifetime_years"});
        load_string(*p, "form_factor", path, s.platform.form_factor);
        load_number(*p, "payload_mass_limit_kg", path, s.platform.payload_mass_limit_kg);
        load_number(*p, "payload_volume_limit_u", path, s.platform.payload_volume_limit_u);
        load_number(*p, "avg_power_min_w", path, s.platform.avg_power_min_w);
        load_number(*p, "avg_power_max_w", path, s.platform.avg_power_max_w);
        load_number(*p, "payload_peak_power_ceiling_w", path,
                    s.platform.payload_peak_power_ceiling_w);
        load_number(*p, "supply_nominal_w", path, s.platform.supply_nominal_w);
        load_number(*p, "supply_peak_w", path, s.platform.supply_peak_w);
        load_number(*p, "battery_capacity_wh", path, s.platform.battery_capacity_wh);
        if (const ojson* j = member(*p, "data_storage_gb"))
            s.platform.data_storage_bits = gb_to_bits(as_number(*j, path + ".data_storage_gb"));
        if (const ojson* j = member(*p, "ttc_rate_mbps"))
            s.platform.ttc_downlink_rate_bps = mbps_to_bps(as_number(*j, path + ".ttc_rate_mbps"));
        load_number(*p, "duty_cycle_floor", path, s.platform.duty_cycle_floor);
        load_number(*p, "lifetime_years", path, s.platform.lifetime_years);
    }

    if (const ojson* o = member(doc, "orbit")) {
        const std::string path = "orbit";
        check_keys(*o, path,
                   {"altitude_km", "inclination_deg", "raan_deg", "true_anomaly_deg", "epoch_s"});
        load_number(*o, "altitude_km", path, s.orbit.altitude_km);
        load_number(*o, "inclination_deg", path, s.orbit.inclination_deg);
        load_number(*o, "raan_deg", path, s.orbit.raan_deg);
        load_number(*o, "true_anomaly_deg", path, s.orbit.true_anomaly_deg);
        load_number(*o, "epoch_s", path, s.orbit.epoch_s);
        s.orbit.inclination_deg = normalize_angle(s.orbit.inclination_deg);
        s.orbit.raan_deg = normalize_angle(s.orbit.raan_deg);
        s.orbit.true_anomaly_deg = normalize_angle(s.orbit.true_anomaly_deg);
    }

    if (const ojson* arr = member(doc, "sdrs")) {
        if (!arr->is_array()) throw Error("schema", "sdrs: expected an array");
        s.sdrs.clear();
        std::size_t i = 0;
        for (const auto& j : *arr) {
            const std::string path = "sdrs[" + std::to_string(i++) + "]";
            check_keys(j, path, {"id", "slots", "standby_w", "active_w"});
            SdrUnit sdr;
            sdr.id = require_string(j, "id", path);
            const ojson* slots = member(j, "slots");
            if (slots == nullptr || !slots->is_array())
                throw Error("schema", path + ": missing slots array");
            for (const auto& slot : *slots) sdr.slots.push_back(as_string(slot, path + ".slots"));
            load_number(j, "standby_w", path, sdr.standby_power_w);
            load_number(j, "active_w", path, sdr.active_power_w);
            s.sdrs.push_back(std::move(sdr));
        }
    }

    if (const ojson* arr = member(doc, "frontends")) {
        if (!arr->is_array()) throw Error("schema", "frontends: expected an array");
        s.frontends.clear();
        std::size_t i = 0;
        for (const auto& j : *arr) {
            const std::string path = "frontends[" + std::to_string(i++) + "]";
            check_keys(j, path,
                       {"id", "band", "ranges_mhz", "link_range_index", "max_rate_mbps",
                        "bandwidth_mhz", "gain_dbi", "use_case"});
            FrontEnd fe;
            fe.id = require_string(j, "id", path);
            const std::string band_text = require_string(j, "band", path);
            const auto band = parse_band(band_text);
            if (!band) throw Error("schema", path + ": unknown band \"" + band_text + "\"");
            fe.band = *band;
            const ojson* ranges = member(j, "ranges_mhz");
            if (ranges == nullptr || !ranges->is_array())
                throw Error("schema", path + ": missing ranges_mhz array");
            for (const auto& r : *ranges) {
                if (!r.is_array() || r.size() != 2)
                    throw Error("schema", path + ".ranges_mhz: expected [low, high] pairs");
                fe.ranges.push_back({mhz_to_hz(as_number(r[0], path)),
                                     mhz_to_hz(as_number(r[1], path))});
            }
            if (const ojson* idx = member(j, "link_range_index"))
                fe.link_range_index = static_cast<std::size_t>(as_number(*idx, path));
            fe.max_gross_rate_bps = mbps_to_bps(require_number(j, "max_rate_mbps", path));
            if (const ojson* bw = member(j, "bandwidth_mhz"))
                fe.max_bandwidth_hz = mhz_to_hz(as_number(*bw, path));
            load_number(j, "gain_dbi", path, fe.antenna_gain_dbi);
            load_string(j, "use_case", path, fe.use_case);
            s.frontends.push_back(std::move(fe));
        }
    }

    if (const ojson* o = member(doc, "optical")) {
        const std::string path = "optical";
        check_keys(*o, path,
                   {"standby_w", "peak_w", "downlink_nm", "downlink_tx_w", "downlink_rate_mbps",
                    "uplink_nm", "uplink_rate_mbps", "range_min_km", "range_max_km",
                    "pointing_req_3sigma_deg", "pointing_error_3sigma_deg"});
        load_number(*o, "standby_w", path, s.optical.standby_power_w);
        load_number(*o, "peak_w", path, s.optical.peak_power_w);
        load_number(*o, "downlink_nm", path, s.optical.downlink_wavelength_nm);
        load_number(*o, "downlink_tx_w", path, s.optical.downlink_tx_power_w);
        if (const ojson* j = member(*o, "downlink_rate_mbps"))
            s.optical.downlink_max_rate_bps = mbps_to_bps(as_number(*j, path));
        load_number(*o, "uplink_nm", path, s.optical.uplink_wavelength_nm);
        if (const ojson* j = member(*o, "uplink_rate_mbps"))
            s.optical.uplink_max_rate_bps = mbps_to_bps(as_number(*j, path));
        load_number(*o, "range_min_km", path, s.optical.range_min_km);
        load_number(*o, "range_max_km", path, s.optical.range_max_km);
        load_number(*o, "pointing_req_3sigma_deg", path,
                    s.optical.pointing_requirement_3sigma_deg);
        load_number(*o, "pointing_error_3sigma_deg", path, s.optical.pointing_error_3sigma_deg);
    }

    if (const ojson* arr = member(doc, "stations")) {
        if (!arr->is_array()) throw Error("schema", "stations: expected an array");
        s.stations.clear();
        std::size_t i = 0;
        for (const auto& j : *arr) {
            const std::string path = "stations[" + std::to_string(i++) + "]";
            check_keys(j, path,
                       {"name", "latitude_deg", "longitude_deg", "altitude_m",
                        "min_elevation_deg", "bands"});
            GroundStation st;
            st.name = require_string(j, "name", path);
            st.latitude_deg = require_number(j, "latitude_deg", path);
            st.longitude_deg = require_number(j, "longitude_deg", path);
            load_number(j, "altitude_m", path, st.altitude_m);
            load_number(j, "min_elevation_deg", path, st.min_elevation_deg);
            const ojson* bands = member(j, "bands");
            if (bands == nullptr || !bands->is_array())
                throw Error("schema", path + ": missing bands array");
            for (const auto& b : *bands) st.supported_bands.insert(as_string(b, path + ".bands"));
            s.stations.push_back(std::move(st));
        }
    }

    if (const ojson* arr = member(doc, "experiments")) {
        if (!arr->is_array()) throw Error("schema", "experiments: expected an array");
        s.experiments.clear();
        std::size_t i = 0;
        for (const auto& j : *arr) {
            const std::string path = "experiments[" + std::to_string(i++) + "]";
            check_keys(j, path,
                       {"id", "priority", "frontends", "requires_optical", "duration_s",
                        "extra_power_w", "data_rate_mbps", "earliest_start_s", "latest_end_s"});
            ExperimentSpec e;
            e.id = require_string(j, "id", path);
            if (const ojson* pr = member(j, "priority"))
                e.priority = static_cast<int>(as_number(*pr, path));
            if (const ojson* fes = member(j, "frontends")) {
                if (!fes->is_array()) throw Error("schema", path + ".frontends: expected array");
                for (const auto& f : *fes)
                    e.required_frontends.insert(as_string(f, path + ".frontends"));
            }
            load_bool(j, "requires_optical", path, e.requires_optical);
            e.duration_s = require_number(j, "duration_s", path);
            load_number(j, "extra_power_w", path, e.extra_power_w);
            if (const ojson* r = member(j, "data_rate_mbps"))
                e.data_production_rate_bps = mbps_to_bps(as_number(*r, path));
            e.earliest_start_s = require_number(j, "earliest_start_s", path);
            e.latest_end_s = require_number(j, "latest_end_s", path);
            s.experiments.push_back(std::move(e));
        }
    }

    if (const ojson* g = member(doc, "generation")) {
        const std::string path = "generation";
        check_keys(*g, path, {"sunlit_power_w", "eclipse_modeled", "sun_direction"});
        load_number(*g, "sunlit_power_w", path, s.generation.sunlit_power_w);
        load_bool(*g, "eclipse_modeled", path, s.generation.eclipse_modeled);
        if (const ojson* sd = member(*g, "sun_direction")) {
            if (!sd->is_array() || sd->size() != 3)
                throw Error("schema", path + ".sun_direction: expected [x, y, z]");
            for (int k = 0; k < 3; ++k)
                s.generation.sun_direction[k] = as_number((*sd)[k], path);
        }
    }

    if (const ojson* t = member(doc, "sim")) {
        const std::string path = "sim";
        check_keys(*t, path, {"duration_s", "step_s", "seed", "enforce_duty_floor"});
        load_number(*t, "duration_s", path, s.sim.duration_s);
        load_number(*t, "step_s", path, s.sim.time_step_s);
        if (const ojson* seed = member(*t, "seed")) {
            if (!seed->is_number_integer())
                throw Error("schema", "sim.seed: expected an integer");
            s.sim.seed = seed->get<std::uint64_t>();
        }
        load_bool(*t, "enforce_duty_floor", path, s.sim.enforce_duty_floor);
    }

    // Cross-reference resolution.
    for (const auto& sdr : s.sdrs) {
        for (const auto& slot : sdr.slots) {
            if (s.find_frontend(slot) == nullptr)
                throw Error("reference",
                            "sdrs[" + sdr.id + "]: dangling front-end id " + slot);
        }
    }
    for (const auto& e : s.experiments) {
        for (const auto& fid : e.required_frontends) {
            if (s.find_frontend(fid) == nullptr)
                throw Error("reference",
                            "experiments[" + e.id + "]: dangling front-end id " + fid);
        }
    }

    return s;
}

/// Canonical document form of a scenario: every field explicit, units as in
/// the schema. load_scenario(emit_scenario(s)) reproduces s exactly.
inline nlohmann::ordered_json scenario_to_json(const Scenario& s) {
    using io_detail::ojson;
    ojson doc;

    doc["platform"] = {{"form_factor", s.platform.form_factor},
                       {"payload_mass_limit_kg", s.platform.payload_mass_limit_kg},
                       {"payload_volume_limit_u", s.platform.payload_volume_limit_u},
                       {"avg_power_min_w", s.platform.avg_power_min_w},
                       {"avg_power_max_w", s.platform.avg_power_max_w},
                       {"payload_peak_power_ceiling_w", s.platform.payload_peak_power_ceiling_w},
                       {"supply_nominal_w", s.platform.supply_nominal_w},
                       {"supply_peak_w", s.platform.supply_peak_w},
                       {"battery_capacity_wh", s.platform.battery_capacity_wh},
                       {"data_storage_gb", static_cast<double>(s.platform.data_storage_bits) / 8e9},
                       {"ttc_rate_mbps", s.platform.ttc_downlink_rate_bps / 1e6},
                       {"duty_cycle_floor", s.platform.duty_cycle_floor},
                       {"lifetime_years", s.platform.lifetime_years}};

    doc["orbit"] = {{"altitude_km", s.orbit.altitude_km},
                    {"inclination_deg", s.orbit.inclination_deg},
                    {"raan_deg", s.orbit.raan_deg},
                    {"true_anomaly_deg", s.orbit.true_anomaly_deg},
                    {"epoch_s", s.orbit.epoch_s}};

    doc["sdrs"] = ojson::array();
    for (const auto& sdr : s.sdrs)
        doc["sdrs"].push_back({{"id", sdr.id},
                               {"slots", sdr.slots},
                               {"standby_w", sdr.standby_power_w},
                               {"active_w", sdr.active_power_w}});

    doc["frontends"] = ojson::array();
    for (const auto& fe : s.frontends) {
        ojson ranges = ojson::array();
        for (const auto& r : fe.ranges)
            ranges.push_back({r.low_hz / 1e6, r.high_hz / 1e6});
        doc["frontends"].push_back({{"id", fe.id},
                                    {"band", band_label(fe.band)},
                                    {"ranges_mhz", ranges},
                                    {"link_range_index", fe.link_range_index},
                                    {"max_rate_mbps", fe.max_gross_rate_bps / 1e6},
                                    {"bandwidth_mhz", fe.max_bandwidth_hz / 1e6},
                                    {"gain_dbi", fe.antenna_gain_dbi},
                                    {"use_case", fe.use_case}});
    }

    doc["optical"] = {{"standby_w", s.optical.standby_power_w},
                      {"peak_w", s.optical.peak_power_w},
                      {"downlink_nm", s.optical.downlink_wavelength_nm},
                      {"downlink_tx_w", s.optical.downlink_tx_power_w},
                      {"downlink_rate_mbps", s.optical.downlink_max_rate_bps / 1e6},
                      {"uplink_nm", s.optical.uplink_wavelength_nm},
                      {"uplink_rate_mbps", s.optical.uplink_max_rate_bps / 1e6},
                      {"range_min_km", s.optical.range_min_km},
                      {"range_max_km", s.optical.range_max_km},
                      {"pointing_req_3sigma_deg", s.optical.pointing_requirement_3sigma_deg},
                      {"pointing_error_3sigma_deg", s.optical.pointing_error_3sigma_deg}};

    doc["stations"] = ojson::array();
    for (const auto& st : s.stations) {
        doc["stations"].push_back(
            {{"name", st.name},
             {"latitude_deg", st.latitude_deg},
             {"longitude_deg", st.longitude_deg},
             {"altitude_m", st.altitude_m},
             {"min_elevation_deg", st.min_elevation_deg},
             {"bands", std::vector<std::string>(st.supported_bands.begin(),
                                                st.supported_bands.end())}});
    }

    doc["experiments"] = ojson::array();
    for (const auto& e : s.experiments) {
        doc["experiments"].push_back(
            {{"id", e.id},
             {"priority", e.priority},
             {"frontends", std::vector<std::string>(e.required_frontends.begin(),
                                                    e.required_frontends.end())},
             {"requires_optical", e.requires_optical},
             {"duration_s", e.duration_s},
             {"extra_power_w", e.extra_power_w},
             {"data_rate_mbps", e.data_production_rate_bps / 1e6},
             {"earliest_start_s", e.earliest_start_s},
             {"latest_end_s", e.latest_end_s}});
    }

    doc["generation"] = {{"sunlit_power_w", s.generation.sunlit_power_w},
                         {"eclipse_modeled", s.generation.eclipse_modeled},
                         {"sun_direction",
                          {s.generation.sun_direction[0], s.generation.sun_direction[1],
                           s.generation.sun_direction[2]}}};

    doc["sim"] = {{"duration_s", s.sim.duration_s},
                  {"step_s", s.sim.time_step_s},
                  {"seed", s.sim.seed},
                  {"enforce_duty_floor", s.sim.enforce_duty_floor}};

    return doc;
}

inline std::string emit_scenario(const Scenario& s) { return scenario_to_json(s).dump(2); }

} // namespace starsim
