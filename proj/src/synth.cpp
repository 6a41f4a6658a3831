#include "mosaic/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "mosaic/error.hpp"
#include "mosaic/ml/dataset.hpp"

namespace mosaic::synth {

namespace {

constexpr std::size_t kMaxAttempts = 64;

constexpr double kRadius = 6'371'000.0;
constexpr double kPi = std::numbers::pi;

double rad(double deg) { return deg * kPi / 180.0; }
double deg(double r) { return r * 180.0 / kPi; }

struct P2 {
    double x = 0.0;  // east, m
    double y = 0.0;  // north, m
};

/// Flat-earth frame about one origin, used only by the generator and oracle.
struct Frame {
    double lat0, lon0, k;

    explicit Frame(const geo::GeoPoint& o) : lat0(o.lat), lon0(o.lon), k(std::cos(rad(o.lat))) {}

    P2 to_plane(const geo::GeoPoint& p) const {
        double dlon = p.lon - lon0;
        if (dlon > 180.0) dlon -= 360.0;
        if (dlon < -180.0) dlon += 360.0;
        return {kRadius * rad(dlon) * k, kRadius * rad(p.lat - lat0)};
    }
    geo::GeoPoint to_geo(P2 v) const {
        double lon = lon0 + deg(v.x / (kRadius * k));
        if (lon >= 180.0) lon -= 360.0;
        if (lon < -180.0) lon += 360.0;
        return {lat0 + deg(v.y / kRadius), lon};
    }
};

double compass(double heading) {
    double h = std::fmod(heading, 360.0);
    if (h < 0.0) h += 360.0;
    return h >= 360.0 ? 0.0 : h;
}

P2 step(P2 from, double heading_deg, double dist) {
    return {from.x + dist * std::sin(rad(heading_deg)), from.y + dist * std::cos(rad(heading_deg))};
}

double bearing_to(P2 from, P2 to) { return compass(deg(std::atan2(to.x - from.x, to.y - from.y))); }

struct Tri {
    P2 v[3];
};

Tri planar_triangle(const geo::SocSenService& s, const Frame& f) {
    const P2 apex = f.to_plane(s.location);
    const double h = 0.5 * s.coverage.alpha_deg;
    return {{apex, step(apex, s.coverage.dir_deg - h, s.coverage.visd_m),
             step(apex, s.coverage.dir_deg + h, s.coverage.visd_m)}};
}

double edge(P2 a, P2 b, P2 p) { return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x); }

bool inside(const Tri& t, P2 p) {
    const double d0 = edge(t.v[0], t.v[1], p), d1 = edge(t.v[1], t.v[2], p), d2 = edge(t.v[2], t.v[0], p);
    const bool has_neg = d0 < 0 || d1 < 0 || d2 < 0;
    const bool has_pos = d0 > 0 || d1 > 0 || d2 > 0;
    return !(has_neg && has_pos);
}

double area(const Tri& t) { return 0.5 * std::abs(edge(t.v[0], t.v[1], t.v[2])); }

/// Share of the smaller triangle covered by the other, estimated at the
/// centroids of a regular subdivision into n² congruent sub-triangles.
double sampled_overlap(const Tri& a, const Tri& b, int n = 48) {
    const bool a_small = area(a) <= area(b);
    const Tri& small = a_small ? a : b;
    const Tri& big = a_small ? b : a;
    if (area(small) <= 1e-9) return 0.0;
    std::size_t hits = 0, total = 0;
    auto point = [&](double u, double v) {
        const double w = 1.0 - u - v;
        return P2{w * small.v[0].x + u * small.v[1].x + v * small.v[2].x,
                  w * small.v[0].y + u * small.v[1].y + v * small.v[2].y};
    };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; i + j < n; ++j) {
            // Upward sub-triangle centroid.
            hits += inside(big, point((i + 1.0 / 3.0) / n, (j + 1.0 / 3.0) / n));
            ++total;
            if (i + j + 1 < n) {
                // Downward sub-triangle centroid.
                hits += inside(big, point((i + 2.0 / 3.0) / n, (j + 2.0 / 3.0) / n));
                ++total;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

double gap(const geo::TimeSpan& a, const geo::TimeSpan& b) {
    return std::max({0.0, b.start_s - a.end_s, a.start_s - b.end_s});
}

std::string make_id(std::size_t scene, char kind, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "s%03zu-%c%02zu", scene, kind, i);
    return buf;
}

}  // namespace

SynthConfig SynthConfig::zero_noise(std::size_t n_relevant, std::uint64_t seed) {
    SynthConfig c;
    c.scenes = 1;
    c.n_relevant = n_relevant;
    c.n_distractor = 0;
    c.relevant_min_dist_m = c.relevant_max_dist_m = 100.0;
    c.reach_factor_min = c.reach_factor_max = 1.05;
    c.alpha_min_deg = c.alpha_max_deg = 30.0;
    c.bearing_jitter_deg = 0.0;
    c.heading_noise_deg = 0.0;
    c.position_jitter_m = 0.0;
    c.query_center_jitter_m = 0.0;
    c.time_jitter_s = 0.0;
    c.distinct_relevant = false;
    c.duplicate_fraction = 0.0;
    c.seed = seed;
    return c;
}

void validate(const SynthConfig& c) {
    auto require = [](bool ok, const char* what) {
        if (!ok) fail(ErrorCode::InvalidArgument, std::string("synthetic config: ") + what);
    };
    require(c.scenes > 0, "need at least one scene");
    require(c.half_length_m > 0 && c.half_width_m > 0, "query half extents must be positive");
    require(c.relevant_min_dist_m > 0 && c.relevant_min_dist_m <= c.relevant_max_dist_m, "bad relevant distance range");
    require(c.reach_factor_min > 0 && c.reach_factor_min <= c.reach_factor_max, "bad reach factor range");
    require(c.alpha_min_deg > 0 && c.alpha_min_deg <= c.alpha_max_deg && c.alpha_max_deg < 180, "bad alpha range");
    require(c.distractor_visd_min_m > 0 && c.distractor_visd_min_m <= c.distractor_visd_max_m, "bad distractor visd range");
    require(c.bearing_jitter_deg >= 0 && c.heading_noise_deg >= 0 && c.position_jitter_m >= 0 &&
                c.query_center_jitter_m >= 0 && c.time_jitter_s >= 0,
            "noise levels must be non-negative");
    require(c.window_s >= 0, "window must be non-negative");
    require(c.aim_offset_fraction >= 0 && c.aim_offset_fraction < 1, "aim offset fraction must be in [0, 1)");
    require(c.duplicate_fraction >= 0 && c.duplicate_fraction <= 1, "duplicate fraction must be in [0, 1]");
    require(c.overlap_bound > 0 && c.overlap_bound <= 1, "overlap bound must be in (0, 1]");
    require(c.scene_spacing_m > 0, "scene spacing must be positive");
    require(c.relevant_arc_deg > 0 && c.relevant_arc_deg <= 360, "relevant arc must be in (0, 360]");
}

bool oracle_composable(const geo::SocSenService& a, const geo::SocSenService& b, const geo::GeoPoint& incident,
                       double window_s, double overlap_bound) {
    const Frame f(incident);
    const Tri ta = planar_triangle(a, f), tb = planar_triangle(b, f);
    const P2 p{0.0, 0.0};
    if (!inside(ta, p) || !inside(tb, p)) return false;
    if (gap(a.time, b.time) > window_s) return false;
    return sampled_overlap(ta, tb) < overlap_bound;
}

std::vector<geo::SceneQuery> SyntheticDataset::queries() const {
    std::vector<geo::SceneQuery> out;
    for (const auto& s : scenes) out.push_back(s.query);
    return out;
}

io::SceneTruth SyntheticDataset::scene_truth() const {
    io::SceneTruth out;
    for (const auto& s : scenes) out.push_back(s.relevant_groups);
    return out;
}

SyntheticDataset generate_synthetic(const SynthConfig& cfg) {
    validate(cfg);
    ml::Rng rng(cfg.seed);
    const Frame city(cfg.city_center);
    const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(cfg.scenes))));
    const double origin = -0.5 * static_cast<double>(cols - 1) * cfg.scene_spacing_m;

    SyntheticDataset out;
    for (std::size_t k = 0; k < cfg.scenes; ++k) {
        SyntheticScene scene;
        const P2 cell{origin + static_cast<double>(k % cols) * cfg.scene_spacing_m,
                      origin + static_cast<double>(k / cols) * cfg.scene_spacing_m};
        scene.incident = city.to_geo(cell);
        scene.incident_time_s = 3600.0 * static_cast<double>(k);
        const Frame f(scene.incident);

        const P2 qc{rng.normal() * cfg.query_center_jitter_m, rng.normal() * cfg.query_center_jitter_m};
        scene.query = {f.to_geo(qc), cfg.half_length_m, cfg.half_width_m,
                       scene.incident_time_s - 0.5 * cfg.window_s, scene.incident_time_s + 0.5 * cfg.window_s};

        std::vector<geo::SocSenService> local;
        const double rotation = rng.uniform(0.0, 360.0);
        std::vector<Tri> accepted;
        for (std::size_t i = 0; i < cfg.n_relevant; ++i) {
            geo::SocSenService s;
            P2 cam;
            double heading = 0.0;
            for (std::size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
                const double ring = rotation + cfg.relevant_arc_deg * (static_cast<double>(i) + 0.5) /
                                                   static_cast<double>(cfg.n_relevant) +
                                    rng.normal() * cfg.bearing_jitter_deg;
                const double dist = rng.uniform(cfg.relevant_min_dist_m, cfg.relevant_max_dist_m);
                const double alpha = rng.uniform(cfg.alpha_min_deg, cfg.alpha_max_deg);
                const double offset = rng.uniform(-1.0, 1.0) * cfg.aim_offset_fraction * 0.5 * alpha;
                cam = step({0.0, 0.0}, ring, dist);
                heading = compass(bearing_to(cam, {0.0, 0.0}) + offset + rng.normal() * cfg.heading_noise_deg);
                cam.x += rng.normal() * cfg.position_jitter_m;
                cam.y += rng.normal() * cfg.position_jitter_m;
                s.location = f.to_geo(cam);
                const double height =
                    dist * std::cos(rad(offset)) * rng.uniform(cfg.reach_factor_min, cfg.reach_factor_max);
                s.coverage = {heading, alpha, height / std::cos(rad(0.5 * alpha))};
                if (!cfg.distinct_relevant) break;
                const Tri t = planar_triangle(s, f);
                const bool distinct = std::all_of(accepted.begin(), accepted.end(), [&](const Tri& o) {
                    return sampled_overlap(t, o) < cfg.overlap_bound;
                });
                if (distinct) break;
            }
            accepted.push_back(planar_triangle(s, f));
            s.id = make_id(k, 'r', i);
            s.time = geo::TimeSpan::instant(scene.incident_time_s + rng.normal() * cfg.time_jitter_s);
            scene.relevant_ids.push_back(s.id);
            scene.relevant_groups.push_back({s.id});

            if (rng.uniform() < cfg.duplicate_fraction) {
                // A second shot of the incident from almost the same spot moments later.
                geo::SocSenService dup = s;
                dup.id = make_id(k, 'b', i);
                for (std::size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
                    dup.location = f.to_geo({cam.x + rng.normal() * 2.0, cam.y + rng.normal() * 2.0});
                    dup.coverage.dir_deg = compass(heading + rng.normal() * 2.0);
                    dup.coverage.visd_m = s.coverage.visd_m * rng.uniform(0.97, 1.03);
                    if (inside(planar_triangle(dup, f), {0.0, 0.0})) break;
                }
                dup.time = geo::TimeSpan::instant(s.time.start_s + rng.uniform(1.0, 30.0));
                scene.relevant_ids.push_back(dup.id);
                scene.relevant_groups.back().push_back(dup.id);
                local.push_back(std::move(s));
                local.push_back(std::move(dup));
            } else {
                local.push_back(std::move(s));
            }
        }
        for (std::size_t i = 0; i < cfg.n_distractor; ++i) {
            geo::SocSenService s;
            s.id = make_id(k, 'd', i);
            for (std::size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
                const P2 cam{rng.uniform(-cfg.half_length_m, cfg.half_length_m),
                             rng.uniform(-cfg.half_width_m, cfg.half_width_m)};
                double heading = rng.uniform(0.0, 360.0);
                if (cfg.distractors_face_away) {
                    heading = compass(bearing_to({0.0, 0.0}, cam) + rng.uniform(-45.0, 45.0));
                }
                s.location = f.to_geo(cam);
                s.coverage = {heading, rng.uniform(cfg.alpha_min_deg, cfg.alpha_max_deg),
                              rng.uniform(cfg.distractor_visd_min_m, cfg.distractor_visd_max_m)};
                if (!cfg.distractors_clear_of_incident || !inside(planar_triangle(s, f), {0.0, 0.0})) break;
            }
            s.time = geo::TimeSpan::instant(scene.incident_time_s + rng.uniform(-cfg.window_s, cfg.window_s));
            scene.distractor_ids.push_back(s.id);
            local.push_back(std::move(s));
        }
        for (std::size_t i = 0; i < local.size(); ++i) {
            for (std::size_t j = i + 1; j < local.size(); ++j) {
                out.labels.set(local[i].id, local[j].id,
                               oracle_composable(local[i], local[j], scene.incident, cfg.window_s, cfg.overlap_bound));
            }
        }
        out.services.insert(out.services.end(), local.begin(), local.end());
        out.scenes.push_back(std::move(scene));
    }
    std::sort(out.services.begin(), out.services.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
}

}  // namespace mosaic::synth
