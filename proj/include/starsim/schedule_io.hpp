#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "starsim/error.hpp"
#include "starsim/schedule.hpp"

namespace starsim {

inline nlohmann::ordered_json schedule_to_json(const Schedule& sched) {
    nlohmann::ordered_json doc;
    doc["entries"] = nlohmann::ordered_json::array();
    for (const auto& e : sched.entries) {
        doc["entries"].push_back(
            {{"id", e.id},
             {"kind", entry_kind_label(e.kind)},
             {"t_start_s", e.t_start},
             {"t_end_s", e.t_end},
             {"devices", std::vector<std::string>(e.devices.begin(), e.devices.end())},
             {"band", e.band},
             {"station", e.station}});
    }
    return doc;
}

inline std::string emit_schedule(const Schedule& sched) { return schedule_to_json(sched).dump(2); }

inline Schedule parse_schedule(const std::string& text) {
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("parse", std::string("schedule document: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array())
        throw Error("schema", "schedule document must hold an entries array");

    Schedule sched;
    for (const auto& j : doc["entries"]) {
        ScheduleEntry e;
        try {
            e.id = j.at("id").get<std::string>();
            const std::string kind = j.at("kind").get<std::string>();
            if (kind == "experiment")
                e.kind = EntryKind::Experiment;
            else if (kind == "downlink")
                e.kind = EntryKind::Downlink;
            else
                throw Error("schema", "unknown entry kind \"" + kind + "\"");
            e.t_start = j.at("t_start_s").get<double>();
            e.t_end = j.at("t_end_s").get<double>();
            for (const auto& d : j.at("devices")) e.devices.insert(d.get<std::string>());
            e.band = j.value("band", std::string{});
            e.station = j.value("station", std::string{});
        } catch (const nlohmann::json::exception& ex) {
            throw Error("schema", std::string("schedule entry: ") + ex.what());
        }
        sched.entries.push_back(std::move(e));
    }
    sched.normalize();
    return sched;
}

} // namespace starsim
