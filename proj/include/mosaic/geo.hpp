// Service model and closed-form coverage geometry on a spherical Earth.
#pragma once

#include <span>
#include <string>

#include "mosaic/planar.hpp"

namespace mosaic::geo {

inline constexpr double kEarthRadiusM = 6'371'000.0;

// =============================================================================
// Domain types
// =============================================================================

/// Latitude/longitude in decimal degrees. Use make_point() to get a
/// validated value with longitude folded into [-180, 180).
struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

GeoPoint make_point(double lat, double lon);

struct CameraIntrinsics {
    double focal_length_mm = 0.0;
    double sensor_extent_mm = 0.0;  // along the direction of the captured scene
};

/// Field-of-view descriptor: compass heading, viewable angle and maximum
/// visible distance.
struct Coverage {
    double dir_deg = 0.0;    // [0, 360), clockwise from North
    double alpha_deg = 0.0;  // (0, 180)
    double visd_m = 0.0;     // > 0
};

void validate(const Coverage& cov);

/// Capture time. An instant has start == end.
struct TimeSpan {
    double start_s = 0.0;
    double end_s = 0.0;

    static TimeSpan instant(double t) { return {t, t}; }
    bool is_instant() const { return start_s == end_s; }
};

/// Gap between two time spans; 0 when they intersect.
double time_gap(const TimeSpan& a, const TimeSpan& b);

/// One crowdsourced image abstracted as a service: no pixels, only the
/// spatio-temporal metadata.
struct SocSenService {
    std::string id;
    GeoPoint location;
    TimeSpan time;
    Coverage coverage;
};

struct FovTriangle {
    GeoPoint apex;
    GeoPoint left;
    GeoPoint right;
};

/// Rectangular region of interest around a center point plus a time window.
/// half_length_m runs east-west, half_width_m north-south.
struct SceneQuery {
    GeoPoint center;
    double half_length_m = 0.0;
    double half_width_m = 0.0;
    double t_start_s = 0.0;
    double t_end_s = 0.0;

    double diagonal_scale_m() const;
    double window_s() const { return t_end_s - t_start_s; }
};

void validate(const SceneQuery& q);

// =============================================================================
// Angles
// =============================================================================

double normalize_bearing(double deg);     // -> [0, 360)
double normalize_difference(double deg);  // -> (-180, 180]
double normalize_lon(double deg);         // -> [-180, 180)

// Exact zeros at odd multiples of 90 degrees, so that perpendicular headings
// give a relevance of exactly 0.
double cos_deg(double deg);
double sin_deg(double deg);

/// Mean direction of two headings. For exactly opposed headings the mean is
/// undefined and `a_deg` is returned.
double circular_mean(double a_deg, double b_deg);

// =============================================================================
// Coverage geometry
// =============================================================================

/// Angular extent of the scene: 2·atan(d / 2f), in degrees.
double viewable_angle(const CameraIntrinsics& intr);

/// Base of the coverage triangle (chord between the two far corners).
double fov_chord(double alpha_deg, double visd_m);

/// Apex-to-base height of the coverage triangle.
double fov_height(double visd_m, double lfov_m);

// =============================================================================
// Spherical geodesy
// =============================================================================

/// Point reached travelling `distance_m` along a great circle with the
/// given initial bearing (spherical law of cosines form).
GeoPoint destination_point(const GeoPoint& origin, double bearing_deg, double distance_m);

/// Haversine distance in meters.
double geodesic_distance(const GeoPoint& p1, const GeoPoint& p2);

/// Initial great-circle bearing from `from` to `to`, in [0, 360).
double initial_bearing(const GeoPoint& from, const GeoPoint& to);

GeoPoint geodesic_midpoint(const GeoPoint& p1, const GeoPoint& p2);

/// Arithmetic mean of coordinates; only meaningful for city-scale sets.
GeoPoint centroid(std::span<const GeoPoint> points);
GeoPoint centroid(std::span<const SocSenService> services);

FovTriangle fov_triangle(const SocSenService& s);

// =============================================================================
// Pairwise features
// =============================================================================

/// Signed heading difference a.dir - b.dir, in (-180, 180].
double angular_overlap(const SocSenService& a, const SocSenService& b);

/// Directional relevance of two services in [-1, 1]. Coverage magnitudes are
/// visd normalized by `visd_max`, the largest visd in the candidate set.
double pair_relevance(const SocSenService& a, const SocSenService& b, double visd_max);
double pair_relevance(const SocSenService& a, const SocSenService& b,
                      std::span<const SocSenService> candidates);

double max_visd(std::span<const SocSenService> candidates);

/// Unsigned angle [0, 180] between a viewing heading and the bearing from
/// `from` to `p`. Coincident points give 0 and raise a data-quality warning.
double direction_to_point(double heading_deg, const GeoPoint& from, const GeoPoint& p);
double direction_to_point(const SocSenService& s, const GeoPoint& p);

/// area(t1 ∩ t2) / min(area(t1), area(t2)) in a local tangent plane.
double triangle_overlap_ratio(const FovTriangle& t1, const FovTriangle& t2);

// =============================================================================
// Local projection
// =============================================================================

/// Equirectangular projection about a fixed anchor: x east, y north, meters.
class LocalProjection {
public:
    explicit LocalProjection(const GeoPoint& anchor);

    planar::Vec2 to_local(const GeoPoint& p) const;
    GeoPoint to_geo(const planar::Vec2& v) const;

    const GeoPoint& anchor() const { return anchor_; }

private:
    GeoPoint anchor_;
    double cos_lat_;
};

}  // namespace mosaic::geo
