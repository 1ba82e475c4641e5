#pragma once

#include <string_view>

namespace starsim {

inline constexpr std::string_view version = "0.1.0";

namespace constants {

inline constexpr double pi = 3.14159265358979323846;

// Two-body gravitational parameter and mean equatorial radius of Earth.
inline constexpr double mu_earth_km3_s2 = 398600.4418;
inline constexpr double earth_radius_km = 6378.137;

// One sidereal day; Earth-fixed frame rotation rate is 360 deg per this.
inline constexpr double sidereal_day_s = 86164.0905;

inline constexpr double speed_of_light_m_s = 299792458.0;

// 10*log10(Boltzmann constant). Link margins add the magnitude of this term.
inline constexpr double boltzmann_dbw_per_k_hz = -228.6;

inline constexpr double deg_to_rad = pi / 180.0;
inline constexpr double rad_to_deg = 180.0 / pi;

} // namespace constants
} // namespace starsim
