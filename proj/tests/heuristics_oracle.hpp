// Brute-force reference for the heuristic filter, written straight from the
// step list without reusing the library's pipeline code. Coverage triangles
// and their overlap come from the (separately tested) geometry module.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mosaic/geo.hpp"

namespace mosaic::testing {

struct OraclePair {
    std::string a, b;
    double relevance = 0.0;
    double position = 0.0;
};

struct OracleResult {
    std::vector<std::string> services;  // sorted
    std::vector<std::pair<std::string, std::string>> ranked_pairs;
};

namespace oracle_detail {

constexpr double kPi = 3.14159265358979323846;
inline double rad(double d) { return d * kPi / 180.0; }
inline double deg(double r) { return r * 180.0 / kPi; }

inline double haversine(geo::GeoPoint p, geo::GeoPoint q) {
    const double dphi = rad(q.lat - p.lat), dl = rad(q.lon - p.lon);
    const double h = std::pow(std::sin(dphi / 2), 2) +
                     std::cos(rad(p.lat)) * std::cos(rad(q.lat)) * std::pow(std::sin(dl / 2), 2);
    return 2 * 6371000.0 * std::asin(std::min(1.0, std::sqrt(h)));
}

inline double bearing(geo::GeoPoint p, geo::GeoPoint q) {
    const double dl = rad(q.lon - p.lon);
    const double y = std::sin(dl) * std::cos(rad(q.lat));
    const double x = std::cos(rad(p.lat)) * std::sin(rad(q.lat)) -
                     std::sin(rad(p.lat)) * std::cos(rad(q.lat)) * std::cos(dl);
    return deg(std::atan2(y, x));
}

// Midpoint via the normalized sum of unit vectors.
inline geo::GeoPoint midpoint(geo::GeoPoint p, geo::GeoPoint q) {
    auto vec = [](geo::GeoPoint g) {
        return std::array<double, 3>{std::cos(rad(g.lat)) * std::cos(rad(g.lon)),
                                     std::cos(rad(g.lat)) * std::sin(rad(g.lon)), std::sin(rad(g.lat))};
    };
    const auto a = vec(p), b = vec(q);
    const double x = a[0] + b[0], y = a[1] + b[1], z = a[2] + b[2];
    return {deg(std::atan2(z, std::hypot(x, y))), deg(std::atan2(y, x))};
}

// Heading difference folded into [0, 180].
inline double heading_gap(double h1, double h2) {
    double d = std::fmod(std::abs(h1 - h2), 360.0);
    return d > 180.0 ? 360.0 - d : d;
}

inline double cos_exact(double gap_deg) {
    if (gap_deg == 90.0) return 0.0;
    return std::cos(rad(gap_deg));
}

}  // namespace oracle_detail

inline OracleResult brute_force_heuristics(const std::vector<geo::SocSenService>& services,
                                           const geo::SceneQuery& q, double threshold = 0.5) {
    using namespace oracle_detail;
    double vmax = 0.0;
    for (const auto& s : services) vmax = std::max(vmax, s.coverage.visd_m);
    const double scale = std::hypot(q.half_length_m, q.half_width_m);

    // Steps 1-3: every pair, relevance, strict positivity.
    std::vector<OraclePair> kept;
    for (std::size_t i = 0; i < services.size(); ++i) {
        for (std::size_t j = 0; j < services.size(); ++j) {
            const auto& x = services[i];
            const auto& y = services[j];
            if (!(x.id < y.id)) continue;
            const double gap = heading_gap(x.coverage.dir_deg, y.coverage.dir_deg);
            const double rel = (x.coverage.visd_m / vmax) * (y.coverage.visd_m / vmax) * cos_exact(gap);
            if (!(rel > 0.0)) continue;
            // Steps 4-5: pair direction toward the center and distance to it.
            const double sx = std::sin(rad(x.coverage.dir_deg)) + std::sin(rad(y.coverage.dir_deg));
            const double cx = std::cos(rad(x.coverage.dir_deg)) + std::cos(rad(y.coverage.dir_deg));
            const double mean_heading = deg(std::atan2(sx, cx));
            const auto mid = midpoint(x.location, y.location);
            const double theta = heading_gap(mean_heading, bearing(mid, q.center));
            const double d = haversine(mid, q.center);
            kept.push_back({x.id, y.id, rel, std::cos(rad(theta)) / (1.0 + d / scale)});
        }
    }

    // Duplicate coverage: repeatedly take the most-overlapping live pair.
    std::map<std::string, const geo::SocSenService*> by_id;
    for (const auto& s : services) by_id[s.id] = &s;
    std::set<std::string> dead;
    while (true) {
        const OraclePair* best = nullptr;
        double best_overlap = -1.0;
        for (const auto& p : kept) {
            if (dead.count(p.a) || dead.count(p.b)) continue;
            const auto& x = *by_id[p.a];
            const auto& y = *by_id[p.b];
            const double dt = std::max({0.0, y.time.start_s - x.time.end_s, x.time.start_s - y.time.end_s});
            if (dt > q.t_end_s - q.t_start_s) continue;
            const double ov = geo::triangle_overlap_ratio(geo::fov_triangle(x), geo::fov_triangle(y));
            if (ov < threshold) continue;
            if (ov > best_overlap || (ov == best_overlap &&
                                      std::tie(p.a, p.b) < std::tie(best->a, best->b))) {
                best = &p;
                best_overlap = ov;
            }
        }
        if (!best) break;
        const double da = haversine(by_id[best->a]->location, q.center);
        const double db = haversine(by_id[best->b]->location, q.center);
        dead.insert(da > db ? best->a : best->b);
    }

    std::vector<OraclePair> live;
    for (const auto& p : kept) {
        if (!dead.count(p.a) && !dead.count(p.b)) live.push_back(p);
    }
    std::sort(live.begin(), live.end(), [](const OraclePair& x, const OraclePair& y) {
        if (x.position != y.position) return x.position > y.position;
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });

    OracleResult out;
    std::set<std::string> used;
    for (const auto& p : live) {
        out.ranked_pairs.emplace_back(p.a, p.b);
        used.insert(p.a);
        used.insert(p.b);
    }
    out.services.assign(used.begin(), used.end());
    return out;
}

}  // namespace mosaic::testing
