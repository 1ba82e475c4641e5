#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "starsim/constants.hpp"
#include "starsim/scenario.hpp"

namespace starsim {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double k) const { return {x * k, y * k, z * k}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        const double n = norm();
        return {x / n, y / n, z / n};
    }
};

inline Vec3 rotate_z(const Vec3& v, double angle_rad) {
    const double c = std::cos(angle_rad), s = std::sin(angle_rad);
    return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

inline Vec3 rotate_x(const Vec3& v, double angle_rad) {
    const double c = std::cos(angle_rad), s = std::sin(angle_rad);
    return {v.x, c * v.y - s * v.z, s * v.y + c * v.z};
}

/// Two-body circular orbit period, T = 2*pi*sqrt(a^3/mu).
inline double orbital_period(double altitude_km) {
    if (!(altitude_km > 0.0))
        throw std::domain_error("orbital_period: altitude must be positive");
    const double a = constants::earth_radius_km + altitude_km;
    return 2.0 * constants::pi * std::sqrt(a * a * a / constants::mu_earth_km3_s2);
}

/// Position on the circular orbit in the inertial frame (aligned with the
/// Earth-fixed frame at the epoch), km.
inline Vec3 propagate_inertial(const OrbitSpec& orbit, double t) {
    const double a = constants::earth_radius_km + orbit.altitude_km;
    const double T = orbital_period(orbit.altitude_km);
    const double u = orbit.true_anomaly_deg * constants::deg_to_rad +
                     2.0 * constants::pi * (t - orbit.epoch_s) / T;
    const Vec3 in_plane{a * std::cos(u), a * std::sin(u), 0.0};
    const Vec3 tilted = rotate_x(in_plane, orbit.inclination_deg * constants::deg_to_rad);
    return rotate_z(tilted, orbit.raan_deg * constants::deg_to_rad);
}

/// Earth-fixed position at time t, km. The Earth-fixed frame rotates at the
/// sidereal rate and coincides with the inertial frame at the epoch.
inline Vec3 propagate(const OrbitSpec& orbit, double t) {
    const double earth_angle = 2.0 * constants::pi * (t - orbit.epoch_s) /
                               constants::sidereal_day_s;
    return rotate_z(propagate_inertial(orbit, t), -earth_angle);
}

/// Station position on the spherical Earth, Earth-fixed km.
inline Vec3 station_ecef(const GroundStation& st) {
    const double r = constants::earth_radius_km + st.altitude_m / 1000.0;
    const double lat = st.latitude_deg * constants::deg_to_rad;
    const double lon = st.longitude_deg * constants::deg_to_rad;
    return {r * std::cos(lat) * std::cos(lon), r * std::cos(lat) * std::sin(lon),
            r * std::sin(lat)};
}

struct LookAngles {
    double elevation_deg = 0.0;
    double slant_range_km = 0.0;
};

/// Elevation above the station's local horizontal and straight-line distance.
inline LookAngles elevation_and_range(const Vec3& sat_ecef, const GroundStation& st) {
    const Vec3 sp = station_ecef(st);
    const Vec3 d = sat_ecef - sp;
    const double slant = d.norm();
    const double sin_el = d.dot(sp.normalized()) / slant;
    return {std::asin(std::clamp(sin_el, -1.0, 1.0)) * constants::rad_to_deg, slant};
}

struct GeoSample {
    double t = 0.0;
    Vec3 sat_position;  // Earth-fixed km
    double elevation_deg = 0.0;
    double slant_range_km = 0.0;
};

struct PassWindow {
    std::string station;
    double t_start = 0.0;
    double t_end = 0.0;
    double max_elevation_deg = 0.0;
    std::vector<GeoSample> samples;

    bool contains(double t) const { return t >= t_start && t <= t_end; }
};

namespace detail {

inline GeoSample geo_sample_at(const OrbitSpec& orbit, const GroundStation& st, double t) {
    GeoSample g;
    g.t = t;
    g.sat_position = propagate(orbit, t);
    const auto look = elevation_and_range(g.sat_position, st);
    g.elevation_deg = look.elevation_deg;
    g.slant_range_km = look.slant_range_km;
    return g;
}

// Bisects the visibility boundary in (lo, hi] where `above(hi)` holds when
// rising (and the converse when setting), returning the bracket endpoint on
// the visible side so every reported sample satisfies the elevation mask.
inline double refine_crossing(const OrbitSpec& orbit, const GroundStation& st, double lo,
                              double hi, bool rising) {
    const double tol = 0.1;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const bool above = geo_sample_at(orbit, st, mid).elevation_deg >= st.min_elevation_deg;
        if (above == rising)
            hi = mid;
        else
            lo = mid;
    }
    return rising ? hi : lo;
}

} // namespace detail

/// Finds every maximal visibility interval of `station` in [t0, t1], sampling
/// at `step` seconds and refining window edges by bisection to 0.1 s. Windows
/// come back sorted by start time and pairwise disjoint.
inline std::vector<PassWindow> find_passes(const OrbitSpec& orbit, const GroundStation& station,
                                           double t0, double t1, double step = 10.0) {
    if (!(t0 < t1)) throw std::domain_error("find_passes: require t0 < t1");
    if (!(step > 0.0)) throw std::domain_error("find_passes: require step > 0");

    std::vector<PassWindow> passes;
    PassWindow current;
    bool inside = false;
    double prev_t = t0;

    auto open_window = [&](double t_start) {
        current = PassWindow{};
        current.station = station.name;
        current.t_start = t_start;
        current.samples.push_back(detail::geo_sample_at(orbit, station, t_start));
        inside = true;
    };
    auto close_window = [&](double t_end) {
        current.t_end = t_end;
        if (current.samples.empty() || current.samples.back().t < t_end)
            current.samples.push_back(detail::geo_sample_at(orbit, station, t_end));
        current.max_elevation_deg = 0.0;
        for (const auto& g : current.samples)
            current.max_elevation_deg = std::max(current.max_elevation_deg, g.elevation_deg);
        if (current.t_end - current.t_start > 1e-6) passes.push_back(std::move(current));
        inside = false;
    };

    for (double t = t0;; t += step) {
        const bool last = t >= t1;
        if (last) t = t1;
        const GeoSample g = detail::geo_sample_at(orbit, station, t);
        const bool above = g.elevation_deg >= station.min_elevation_deg;

        if (above && !inside) {
            const double t_start =
                (t == t0) ? t0 : detail::refine_crossing(orbit, station, prev_t, t, true);
            open_window(t_start);
            if (t > t_start) current.samples.push_back(g);
        } else if (above && inside) {
            current.samples.push_back(g);
        } else if (!above && inside) {
            close_window(detail::refine_crossing(orbit, station, prev_t, t, false));
        }

        prev_t = t;
        if (last) break;
    }
    if (inside) close_window(t1);

    return passes;
}

/// Passes of every station, merged and sorted by (t_start, station name).
inline std::vector<PassWindow> find_all_passes(const OrbitSpec& orbit,
                                               const std::vector<GroundStation>& stations,
                                               double t0, double t1, double step = 10.0) {
    std::vector<PassWindow> all;
    for (const auto& st : stations) {
        auto p = find_passes(orbit, st, t0, t1, step);
        all.insert(all.end(), std::make_move_iterator(p.begin()),
                   std::make_move_iterator(p.end()));
    }
    std::sort(all.begin(), all.end(), [](const PassWindow& a, const PassWindow& b) {
        return a.t_start != b.t_start ? a.t_start < b.t_start : a.station < b.station;
    });
    return all;
}

} // namespace starsim
