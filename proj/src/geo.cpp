#include "mosaic/geo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "mosaic/diagnostics.hpp"
#include "mosaic/error.hpp"

namespace mosaic::geo {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// Points closer than this (in degrees, per axis) are treated as coincident.
constexpr double kCoincidentDeg = 1e-9;

std::string describe(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

GeoPoint make_point(double lat, double lon) {
    if (!std::isfinite(lat) || !std::isfinite(lon)) {
        fail(ErrorCode::InvalidPoint, "coordinates must be finite");
    }
    if (lat < -90.0 || lat > 90.0) {
        fail(ErrorCode::InvalidPoint, "latitude " + describe(lat) + " outside [-90, 90]");
    }
    return {lat, normalize_lon(lon)};
}

void validate(const Coverage& cov) {
    if (!std::isfinite(cov.dir_deg) || cov.dir_deg < 0.0 || cov.dir_deg >= 360.0) {
        fail(ErrorCode::InvalidCoverage, "dir " + describe(cov.dir_deg) + " outside [0, 360)");
    }
    if (!std::isfinite(cov.alpha_deg) || cov.alpha_deg <= 0.0 || cov.alpha_deg >= 180.0) {
        fail(ErrorCode::InvalidCoverage, "alpha " + describe(cov.alpha_deg) + " outside (0, 180)");
    }
    if (!std::isfinite(cov.visd_m) || cov.visd_m <= 0.0) {
        fail(ErrorCode::InvalidCoverage, "visd " + describe(cov.visd_m) + " must be positive");
    }
}

double time_gap(const TimeSpan& a, const TimeSpan& b) {
    return std::max({0.0, b.start_s - a.end_s, a.start_s - b.end_s});
}

double SceneQuery::diagonal_scale_m() const {
    return std::hypot(half_length_m, half_width_m);
}

void validate(const SceneQuery& q) {
    make_point(q.center.lat, q.center.lon);
    if (!(q.half_length_m > 0.0) || !(q.half_width_m > 0.0)) {
        fail(ErrorCode::InvalidQuery, "query half extents must be positive");
    }
    if (!std::isfinite(q.t_start_s) || !std::isfinite(q.t_end_s) || q.t_start_s > q.t_end_s) {
        fail(ErrorCode::InvalidQuery, "query time window must satisfy t_start <= t_end");
    }
}

// -----------------------------------------------------------------------------

double normalize_bearing(double deg) {
    double r = std::fmod(deg, 360.0);
    if (r < 0.0) r += 360.0;
    if (r >= 360.0) r = 0.0;
    return r;
}

double normalize_difference(double deg) {
    double r = std::fmod(deg, 360.0);
    if (r <= -180.0) r += 360.0;
    if (r > 180.0) r -= 360.0;
    return r;
}

double normalize_lon(double deg) {
    if (deg >= -180.0 && deg < 180.0) return deg;
    double r = std::fmod(deg + 180.0, 360.0);
    if (r < 0.0) r += 360.0;
    r -= 180.0;
    if (r >= 180.0) r = -180.0;
    return r;
}

double cos_deg(double deg) {
    const double r = normalize_bearing(deg);
    if (r == 90.0 || r == 270.0) return 0.0;
    if (r == 0.0) return 1.0;
    if (r == 180.0) return -1.0;
    return std::cos(r * kDegToRad);
}

double sin_deg(double deg) {
    const double r = normalize_bearing(deg);
    if (r == 0.0 || r == 180.0) return 0.0;
    if (r == 90.0) return 1.0;
    if (r == 270.0) return -1.0;
    return std::sin(r * kDegToRad);
}

double circular_mean(double a_deg, double b_deg) {
    const double s = sin_deg(a_deg) + sin_deg(b_deg);
    const double c = cos_deg(a_deg) + cos_deg(b_deg);
    if (std::abs(s) < 1e-15 && std::abs(c) < 1e-15) return normalize_bearing(a_deg);
    return normalize_bearing(std::atan2(s, c) * kRadToDeg);
}

// -----------------------------------------------------------------------------

double viewable_angle(const CameraIntrinsics& intr) {
    if (!(intr.focal_length_mm > 0.0) || !(intr.sensor_extent_mm > 0.0) ||
        !std::isfinite(intr.focal_length_mm) || !std::isfinite(intr.sensor_extent_mm)) {
        fail(ErrorCode::InvalidIntrinsics, "focal length and sensor extent must be positive");
    }
    return 2.0 * std::atan(intr.sensor_extent_mm / (2.0 * intr.focal_length_mm)) * kRadToDeg;
}

double fov_chord(double alpha_deg, double visd_m) {
    if (!(alpha_deg > 0.0) || !(alpha_deg < 180.0)) {
        fail(ErrorCode::InvalidCoverage, "alpha " + describe(alpha_deg) + " outside (0, 180)");
    }
    if (!(visd_m > 0.0) || !std::isfinite(visd_m)) {
        fail(ErrorCode::InvalidCoverage, "visd must be positive");
    }
    return 2.0 * visd_m * std::sin(0.5 * alpha_deg * kDegToRad);
}

double fov_height(double visd_m, double lfov_m) {
    if (!(visd_m > 0.0) || !(lfov_m >= 0.0)) {
        fail(ErrorCode::InvalidCoverage, "visd must be positive and lfov non-negative");
    }
    const double half = 0.5 * lfov_m;
    if (half > visd_m * (1.0 + 1e-12)) {
        fail(ErrorCode::GeometryInconsistency,
             "lfov " + describe(lfov_m) + " exceeds twice visd " + describe(visd_m));
    }
    return std::sqrt(std::max(0.0, visd_m * visd_m - half * half));
}

// -----------------------------------------------------------------------------

GeoPoint destination_point(const GeoPoint& origin, double bearing_deg, double distance_m) {
    if (!(distance_m >= 0.0) || !std::isfinite(distance_m)) {
        fail(ErrorCode::InvalidArgument, "distance must be non-negative");
    }
    if (distance_m == 0.0) return {origin.lat, normalize_lon(origin.lon)};

    const double phi1 = origin.lat * kDegToRad;
    const double lambda1 = origin.lon * kDegToRad;
    const double theta = bearing_deg * kDegToRad;
    const double delta = distance_m / kEarthRadiusM;

    const double sin_phi2 =
        std::sin(phi1) * std::cos(delta) + std::cos(phi1) * std::sin(delta) * std::cos(theta);
    const double phi2 = std::asin(std::clamp(sin_phi2, -1.0, 1.0));
    const double lambda2 =
        lambda1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(phi1),
                             std::cos(delta) - std::sin(phi1) * std::sin(phi2));
    return {phi2 * kRadToDeg, normalize_lon(lambda2 * kRadToDeg)};
}

double geodesic_distance(const GeoPoint& p1, const GeoPoint& p2) {
    const double phi1 = p1.lat * kDegToRad;
    const double phi2 = p2.lat * kDegToRad;
    const double dphi = phi2 - phi1;
    const double dlambda = normalize_difference(p2.lon - p1.lon) * kDegToRad;
    const double s1 = std::sin(0.5 * dphi);
    const double s2 = std::sin(0.5 * dlambda);
    const double a = std::clamp(s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2, 0.0, 1.0);
    return 2.0 * kEarthRadiusM * std::atan2(std::sqrt(a), std::sqrt(1.0 - a));
}

double initial_bearing(const GeoPoint& from, const GeoPoint& to) {
    const double phi1 = from.lat * kDegToRad;
    const double phi2 = to.lat * kDegToRad;
    const double dlambda = normalize_difference(to.lon - from.lon) * kDegToRad;
    const double y = std::sin(dlambda) * std::cos(phi2);
    const double x = std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dlambda);
    return normalize_bearing(std::atan2(y, x) * kRadToDeg);
}

GeoPoint geodesic_midpoint(const GeoPoint& p1, const GeoPoint& p2) {
    const double phi1 = p1.lat * kDegToRad;
    const double phi2 = p2.lat * kDegToRad;
    const double lambda1 = p1.lon * kDegToRad;
    const double dlambda = normalize_difference(p2.lon - p1.lon) * kDegToRad;
    const double bx = std::cos(phi2) * std::cos(dlambda);
    const double by = std::cos(phi2) * std::sin(dlambda);
    const double phi_m = std::atan2(std::sin(phi1) + std::sin(phi2),
                                    std::hypot(std::cos(phi1) + bx, by));
    const double lambda_m = lambda1 + std::atan2(by, std::cos(phi1) + bx);
    return {phi_m * kRadToDeg, normalize_lon(lambda_m * kRadToDeg)};
}

GeoPoint centroid(std::span<const GeoPoint> points) {
    if (points.empty()) fail(ErrorCode::InvalidArgument, "centroid of an empty set");
    // Longitudes are averaged as offsets from the first point so that sets
    // straddling the antimeridian stay contiguous.
    const double ref = points.front().lon;
    double lat = 0.0;
    double dlon = 0.0;
    for (const auto& p : points) {
        lat += p.lat;
        dlon += normalize_difference(p.lon - ref);
    }
    const double n = static_cast<double>(points.size());
    return {lat / n, normalize_lon(ref + dlon / n)};
}

GeoPoint centroid(std::span<const SocSenService> services) {
    std::vector<GeoPoint> pts;
    pts.reserve(services.size());
    for (const auto& s : services) pts.push_back(s.location);
    return centroid(pts);
}

FovTriangle fov_triangle(const SocSenService& s) {
    validate(s.coverage);
    const auto& cov = s.coverage;
    const double half = 0.5 * cov.alpha_deg;
    return {
        s.location,
        destination_point(s.location, normalize_bearing(cov.dir_deg - half), cov.visd_m),
        destination_point(s.location, normalize_bearing(cov.dir_deg + half), cov.visd_m),
    };
}

// -----------------------------------------------------------------------------

double angular_overlap(const SocSenService& a, const SocSenService& b) {
    return normalize_difference(a.coverage.dir_deg - b.coverage.dir_deg);
}

double max_visd(std::span<const SocSenService> candidates) {
    if (candidates.empty()) {
        fail(ErrorCode::InvalidContext, "relevance needs a non-empty candidate set");
    }
    double m = 0.0;
    for (const auto& s : candidates) m = std::max(m, s.coverage.visd_m);
    return m;
}

double pair_relevance(const SocSenService& a, const SocSenService& b, double visd_max) {
    if (!(visd_max > 0.0) || !std::isfinite(visd_max)) {
        fail(ErrorCode::InvalidContext, "candidate-set visd maximum must be positive");
    }
    const double ma = a.coverage.visd_m / visd_max;
    const double mb = b.coverage.visd_m / visd_max;
    if (ma > 1.0 || mb > 1.0) {
        fail(ErrorCode::InvalidContext, "service visd exceeds candidate-set maximum");
    }
    return ma * mb * cos_deg(std::abs(angular_overlap(a, b)));
}

double pair_relevance(const SocSenService& a, const SocSenService& b,
                      std::span<const SocSenService> candidates) {
    return pair_relevance(a, b, max_visd(candidates));
}

double direction_to_point(double heading_deg, const GeoPoint& from, const GeoPoint& p) {
    if (std::abs(from.lat - p.lat) < kCoincidentDeg &&
        std::abs(normalize_difference(from.lon - p.lon)) < kCoincidentDeg) {
        warn("direction_to_point: location coincides with the target point; using 0");
        return 0.0;
    }
    return std::abs(normalize_difference(heading_deg - initial_bearing(from, p)));
}

double direction_to_point(const SocSenService& s, const GeoPoint& p) {
    return direction_to_point(s.coverage.dir_deg, s.location, p);
}

double triangle_overlap_ratio(const FovTriangle& t1, const FovTriangle& t2) {
    const std::array<GeoPoint, 6> all{t1.apex, t1.left, t1.right, t2.apex, t2.left, t2.right};
    const LocalProjection proj(centroid(all));
    const std::array<planar::Vec2, 3> a{proj.to_local(t1.apex), proj.to_local(t1.left),
                                        proj.to_local(t1.right)};
    const std::array<planar::Vec2, 3> b{proj.to_local(t2.apex), proj.to_local(t2.left),
                                        proj.to_local(t2.right)};
    const double area_a = std::abs(planar::signed_area(a));
    const double area_b = std::abs(planar::signed_area(b));
    const double denom = std::min(area_a, area_b);
    if (!(denom > 1e-9)) return 0.0;
    const auto inter = planar::clip_convex(a, b);
    const double ratio = std::abs(planar::signed_area(inter)) / denom;
    return std::clamp(ratio, 0.0, 1.0);
}

// -----------------------------------------------------------------------------

LocalProjection::LocalProjection(const GeoPoint& anchor)
    : anchor_(anchor), cos_lat_(std::cos(anchor.lat * kDegToRad)) {}

planar::Vec2 LocalProjection::to_local(const GeoPoint& p) const {
    return {kEarthRadiusM * normalize_difference(p.lon - anchor_.lon) * kDegToRad * cos_lat_,
            kEarthRadiusM * (p.lat - anchor_.lat) * kDegToRad};
}

GeoPoint LocalProjection::to_geo(const planar::Vec2& v) const {
    return {anchor_.lat + v.y / kEarthRadiusM * kRadToDeg,
            normalize_lon(anchor_.lon + v.x / (kEarthRadiusM * cos_lat_) * kRadToDeg)};
}

}  // namespace mosaic::geo
