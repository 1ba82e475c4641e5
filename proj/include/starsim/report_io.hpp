#pragma once

#include <cstdio>
#include <map>
#include <string>

#include <json.hpp>

#include "starsim/error.hpp"
#include "starsim/sim.hpp"

namespace starsim {

namespace io_detail {

inline std::string csv_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace io_detail

inline nlohmann::ordered_json report_to_json(const Report& r) {
    using ojson = nlohmann::ordered_json;
    ojson doc;
    doc["scenario_digest"] = r.scenario_digest;

    doc["events"] = ojson::array();
    for (const auto& e : r.events)
        doc["events"].push_back({{"t", e.t},
                                 {"event", event_kind_label(e.kind)},
                                 {"device", e.device},
                                 {"detail", e.detail}});

    doc["energy_trace"] = ojson::array();
    for (const auto& s : r.energy_trace)
        doc["energy_trace"].push_back({{"t_s", s.t},
                                       {"soc_wh", s.soc_wh},
                                       {"generation_w", s.generation_w},
                                       {"load_w", s.load_w}});

    doc["storage_trace"] = ojson::array();
    for (const auto& s : r.storage_trace)
        doc["storage_trace"].push_back({{"t_s", s.t}, {"used_bits", s.used_bits}});

    doc["pass_volumes"] = ojson::array();
    for (const auto& v : r.pass_volumes)
        doc["pass_volumes"].push_back({{"station", v.station},
                                       {"band", v.band},
                                       {"t_start_s", v.t_start},
                                       {"t_end_s", v.t_end},
                                       {"bits", v.bits}});

    doc["duty_cycle"] = {{"per_orbit", r.duty_cycle.per_orbit}, {"min", r.duty_cycle.min_value}};

    doc["violations"] = ojson::array();
    for (const auto& v : r.violations)
        doc["violations"].push_back({{"code", v.code}, {"t", v.t}, {"detail", v.detail}});

    doc["totals"] = {{"produced_bits", r.totals.produced_bits},
                     {"downlinked_bits", r.totals.downlinked_bits},
                     {"dropped_bits", r.totals.dropped_bits},
                     {"remaining_bits", r.totals.remaining_bits}};
    return doc;
}

inline std::string emit_report_json(const Report& r) { return report_to_json(r).dump(2); }

inline Report parse_report(const std::string& text) {
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("parse", std::string("report document: ") + e.what());
    }
    Report r;
    try {
        r.scenario_digest = doc.at("scenario_digest").get<std::string>();
        for (const auto& j : doc.at("events")) {
            SimEvent e;
            e.t = j.at("t").get<double>();
            const auto kind = parse_event_kind(j.at("event").get<std::string>());
            if (!kind) throw Error("schema", "unknown event kind in report");
            e.kind = *kind;
            e.device = j.at("device").get<std::string>();
            e.detail = j.at("detail").get<std::string>();
            r.events.push_back(std::move(e));
        }
        for (const auto& j : doc.at("energy_trace"))
            r.energy_trace.push_back({j.at("t_s").get<double>(), j.at("soc_wh").get<double>(),
                                      j.at("generation_w").get<double>(),
                                      j.at("load_w").get<double>()});
        for (const auto& j : doc.at("storage_trace"))
            r.storage_trace.push_back(
                {j.at("t_s").get<double>(), j.at("used_bits").get<std::uint64_t>()});
        for (const auto& j : doc.at("pass_volumes"))
            r.pass_volumes.push_back({j.at("station").get<std::string>(),
                                      j.at("band").get<std::string>(),
                                      j.at("t_start_s").get<double>(),
                                      j.at("t_end_s").get<double>(),
                                      j.at("bits").get<std::uint64_t>()});
        r.duty_cycle.per_orbit =
            doc.at("duty_cycle").at("per_orbit").get<std::vector<double>>();
        r.duty_cycle.min_value = doc.at("duty_cycle").at("min").get<double>();
        for (const auto& j : doc.at("violations"))
            r.violations.push_back({j.at("code").get<std::string>(), j.at("t").get<double>(),
                                    j.at("detail").get<std::string>()});
        const auto& t = doc.at("totals");
        r.totals = {t.at("produced_bits").get<std::uint64_t>(),
                    t.at("downlinked_bits").get<std::uint64_t>(),
                    t.at("dropped_bits").get<std::uint64_t>(),
                    t.at("remaining_bits").get<std::uint64_t>()};
    } catch (const nlohmann::json::exception& e) {
        throw Error("schema", std::string("report document: ") + e.what());
    }
    return r;
}

inline std::string emit_energy_csv(const Report& r) {
    std::string out = "t_s,soc_wh,generation_w,load_w\n";
    for (const auto& s : r.energy_trace) {
        out += io_detail::csv_num(s.t) + "," + io_detail::csv_num(s.soc_wh) + "," +
               io_detail::csv_num(s.generation_w) + "," + io_detail::csv_num(s.load_w) + "\n";
    }
    return out;
}

inline std::string emit_storage_csv(const Report& r) {
    std::string out = "t_s,used_bits\n";
    for (const auto& s : r.storage_trace)
        out += io_detail::csv_num(s.t) + "," + std::to_string(s.used_bits) + "\n";
    return out;
}

/// Renders a report to its file set: the full object for "json", one file
/// per trace for "csv".
inline std::map<std::string, std::string> emit_report(const Report& r,
                                                      const std::string& format) {
    if (format == "json") return {{"report.json", emit_report_json(r)}};
    if (format == "csv")
        return {{"report_energy.csv", emit_energy_csv(r)},
                {"report_storage.csv", emit_storage_csv(r)}};
    throw Error("unsupported-format", "report format must be json or csv, got " + format);
}

} // namespace starsim
