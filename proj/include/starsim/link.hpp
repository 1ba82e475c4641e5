#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "starsim/constants.hpp"
#include "starsim/error.hpp"
#include "starsim/orbit.hpp"
#include "starsim/scenario.hpp"

namespace starsim {

/// RF budget inputs for one band. The platform design pins only the antenna
/// gains; the remaining figures are configurable calibration values chosen so
/// the baseline scenario closes every band at 10 degrees elevation and up.
struct RfLinkParams {
    double tx_power_dbw = 0.0;
    double tx_gain_dbi = 0.0;
    double rx_gain_dbi = 0.0;
    double system_losses_db = 2.0;
    double required_margin_db = 3.0;
    double rx_figure_of_merit_db_k = 0.0;  // ground-station G/T
    std::optional<double> required_cn0_dbhz;
};

/// Per-band RF parameters keyed by band label ("UHF", "L/S", "X", "Ka",
/// "TTC" for the platform operations link).
struct LinkConfig {
    std::map<std::string, RfLinkParams> rf;
};

inline LinkConfig default_link_config() {
    LinkConfig cfg;
    cfg.rf["UHF"] = {0.0, 3.0, 0.0, 2.0, 3.0, -18.0, 53.0};
    cfg.rf["L/S"] = {0.0, 10.0, 0.0, 2.0, 3.0, 3.0, 67.0};
    cfg.rf["X"] = {0.0, 11.0, 0.0, 2.0, 3.0, 16.0, 70.0};
    cfg.rf["Ka"] = {0.0, 11.0, 0.0, 2.0, 3.0, 25.0, 73.0};
    cfg.rf["TTC"] = {0.0, 10.0, 0.0, 2.0, 3.0, 6.0, 73.0};
    return cfg;
}

inline const RfLinkParams& params_for_band(const LinkConfig& cfg, const std::string& band) {
    const auto it = cfg.rf.find(band);
    if (it == cfg.rf.end())
        throw Error("config", "no link parameters configured for band " + band);
    return it->second;
}

struct LinkAssessment {
    bool closed = false;
    double margin_db = 0.0;  // RF margin; 0 for the optical gate
    double achievable_rate_bps = 0.0;
    std::string limiting_factor;  // range | pointing | margin | band-cap
};

/// Free-space path loss, 20*log10(4*pi*d*f/c).
inline double fspl_db(double frequency_hz, double distance_km) {
    if (!(frequency_hz > 0.0)) throw std::domain_error("fspl_db: frequency must be positive");
    if (!(distance_km > 0.0)) throw std::domain_error("fspl_db: distance must be positive");
    return 20.0 * std::log10(4.0 * constants::pi * distance_km * 1000.0 * frequency_hz /
                             constants::speed_of_light_m_s);
}

/// Margin-based closure for one RF front-end at the given slant range. The
/// budget is evaluated at the center of the front-end's designated link
/// range. Closure is boundary-inclusive; the achievable rate is the band's
/// gross cap or zero.
inline LinkAssessment rf_assess(const FrontEnd& fe, const RfLinkParams& params,
                                double slant_range_km) {
    if (!(slant_range_km > 0.0))
        throw std::domain_error("rf_assess: slant range must be positive");
    if (!params.required_cn0_dbhz)
        throw Error("config", "required C/N0 missing for band " + band_label(fe.band));

    const double cn0 = params.tx_power_dbw + params.tx_gain_dbi + params.rx_gain_dbi -
                       fspl_db(fe.link_range().center_hz(), slant_range_km) -
                       params.system_losses_db + params.rx_figure_of_merit_db_k -
                       constants::boltzmann_dbw_per_k_hz;

    LinkAssessment a;
    a.margin_db = cn0 - *params.required_cn0_dbhz;
    a.closed = a.margin_db >= params.required_margin_db;
    a.achievable_rate_bps = a.closed ? fe.max_gross_rate_bps : 0.0;
    a.limiting_factor = a.closed ? "band-cap" : "margin";
    return a;
}

enum class OpticalDirection { Down, Up };

/// Hard-gate closure for the laser terminal: the slant range must lie inside
/// the terminal's operating window and the achieved pointing must meet the
/// 3-sigma requirement. Both comparisons are boundary-inclusive; the range
/// check is reported first when several gates fail.
inline LinkAssessment optical_assess(const OpticalTerminal& term, double slant_range_km,
                                     double pointing_error_3sigma_deg,
                                     OpticalDirection direction) {
    if (!(slant_range_km > 0.0))
        throw std::domain_error("optical_assess: slant range must be positive");

    LinkAssessment a;
    const bool range_ok =
        slant_range_km >= term.range_min_km && slant_range_km <= term.range_max_km;
    const bool pointing_ok =
        pointing_error_3sigma_deg <= term.pointing_requirement_3sigma_deg;

    if (!range_ok) {
        a.limiting_factor = "range";
    } else if (!pointing_ok) {
        a.limiting_factor = "pointing";
    } else {
        a.closed = true;
        a.limiting_factor = "band-cap";
        a.achievable_rate_bps = direction == OpticalDirection::Down ? term.downlink_max_rate_bps
                                                                    : term.uplink_max_rate_bps;
    }
    return a;
}

/// Deliverable volume over a pass: trapezoidal integral of the achievable
/// rate across the window's geometry samples.
inline double pass_capacity_bits(const PassWindow& window,
                                 const std::function<LinkAssessment(const GeoSample&)>& assess) {
    if (window.samples.size() < 2)
        throw std::domain_error("pass_capacity_bits: window needs at least two samples");
    double bits = 0.0;
    double prev_rate = assess(window.samples.front()).achievable_rate_bps;
    for (std::size_t i = 1; i < window.samples.size(); ++i) {
        const double rate = assess(window.samples[i]).achievable_rate_bps;
        const double dt = window.samples[i].t - window.samples[i - 1].t;
        bits += 0.5 * (prev_rate + rate) * dt;
        prev_rate = rate;
    }
    return bits;
}

} // namespace starsim
