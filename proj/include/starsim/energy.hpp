#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

#include "starsim/orbit.hpp"
#include "starsim/payload.hpp"
#include "starsim/scenario.hpp"

namespace starsim {

struct EnergyState {
    double soc_wh = 0.0;
    double t = 0.0;
    double last_generation_w = 0.0;
    double last_load_w = 0.0;
};

struct LoadProfile {
    std::map<std::string, double> components_w;  // device or experiment id -> draw
    double total_w = 0.0;
};

namespace detail {

inline double sdr_draw_w(const SdrUnit& sdr, DeviceMode mode) {
    switch (mode) {
        case DeviceMode::Off: return 0.0;
        case DeviceMode::Standby: return sdr.standby_power_w;
        case DeviceMode::Active: return sdr.active_power_w;
    }
    return 0.0;
}

inline double optical_draw_w(const OpticalTerminal& term, DeviceMode mode) {
    switch (mode) {
        case DeviceMode::Off: return 0.0;
        case DeviceMode::Standby: return term.standby_power_w;
        case DeviceMode::Active: return term.peak_power_w;
    }
    return 0.0;
}

} // namespace detail

/// Instantaneous payload draw: mode-dependent device power plus the extra
/// power of every running experiment.
inline LoadProfile total_load(const PayloadState& state, const Scenario& scenario) {
    LoadProfile p;
    for (const auto& [id, sdr_state] : state.sdrs) {
        if (const SdrUnit* sdr = scenario.find_sdr(id)) {
            const double w = detail::sdr_draw_w(*sdr, sdr_state.mode);
            if (w > 0.0) p.components_w[id] = w;
            p.total_w += w;
        }
    }
    const double ow = detail::optical_draw_w(scenario.optical, state.optical_mode);
    if (ow > 0.0) p.components_w[optical_device_id] = ow;
    p.total_w += ow;

    for (const auto& exp_id : state.active_experiments) {
        if (const ExperimentSpec* exp = scenario.find_experiment(exp_id)) {
            if (exp->extra_power_w != 0.0) p.components_w[exp_id] = exp->extra_power_w;
            p.total_w += exp->extra_power_w;
        }
    }
    return p;
}

enum class SupplyStatus { Ok, ExceedsPeak, ExceedsNominal };

/// Checks a load against the platform supply contract. Boundary values pass:
/// the peak cap binds always, the nominal cap only for sustained loads.
inline SupplyStatus check_supply(const LoadProfile& load, const PlatformSpec& platform,
                                 bool sustained) {
    if (load.total_w > platform.supply_peak_w) return SupplyStatus::ExceedsPeak;
    if (sustained && load.total_w > platform.supply_nominal_w)
        return SupplyStatus::ExceedsNominal;
    return SupplyStatus::Ok;
}

struct EnergyStepResult {
    EnergyState state;
    bool depleted = false;   // pre-clamp charge went negative
    bool saturated = false;  // pre-clamp charge exceeded capacity
};

/// Forward-Euler battery update over one step of piecewise-constant rates,
/// clamped to [0, capacity].
inline EnergyStepResult energy_step(EnergyState state, double generation_w, double load_w,
                                    double dt_s, double capacity_wh) {
    if (!(dt_s > 0.0)) throw std::domain_error("energy_step: dt must be positive");
    EnergyStepResult r;
    const double unclamped = state.soc_wh + (generation_w - load_w) * dt_s / 3600.0;
    r.depleted = unclamped < 0.0;
    r.saturated = unclamped > capacity_wh;
    state.soc_wh = std::clamp(unclamped, 0.0, capacity_wh);
    state.t += dt_s;
    state.last_generation_w = generation_w;
    state.last_load_w = load_w;
    r.state = state;
    return r;
}

/// Solar input at time t. Without eclipse modeling this is the constant
/// sunlit figure; with it, generation drops to zero inside the cylindrical
/// Earth shadow cast along the scenario's fixed sun direction.
inline double generation_at(double t, const OrbitSpec& orbit, const GenerationModel& model) {
    if (!model.eclipse_modeled) return model.sunlit_power_w;
    const Vec3 r = propagate_inertial(orbit, t);
    const Vec3 sun = Vec3{model.sun_direction[0], model.sun_direction[1],
                          model.sun_direction[2]}
                         .normalized();
    const double along = r.dot(sun);
    if (along >= 0.0) return model.sunlit_power_w;  // sun side
    const Vec3 perp = r - sun * along;
    return perp.norm() < constants::earth_radius_km ? 0.0 : model.sunlit_power_w;
}

} // namespace starsim
