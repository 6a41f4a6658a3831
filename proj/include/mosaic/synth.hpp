// Seeded synthetic city of incident scenes with geometric ground truth.
//
// Labels come from a planar oracle that shares no code with the geometry,
// heuristics or classifier modules: a pair is composable iff both coverage
// triangles contain the scene's incident point, their capture times are
// within the query window, and their triangles overlap by less than the
// duplication bound.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mosaic/geo.hpp"
#include "mosaic/io/metadata.hpp"

namespace mosaic::synth {

struct SynthConfig {
    geo::GeoPoint city_center{-37.8136, 144.9631};
    std::size_t scenes = 70;
    double scene_spacing_m = 1000.0;  // scenes sit on a square grid
    double half_length_m = 200.0;     // query half extents
    double half_width_m = 200.0;

    std::size_t n_relevant = 5;
    std::size_t n_distractor = 28;

    double relevant_min_dist_m = 80.0;   // camera to incident
    double relevant_max_dist_m = 120.0;
    double reach_factor_min = 1.02;      // triangle height / distance to incident
    double reach_factor_max = 1.15;
    double alpha_min_deg = 25.0;
    double alpha_max_deg = 40.0;
    double relevant_arc_deg = 360.0;     // cameras spread evenly over this arc around the incident
    double bearing_jitter_deg = 10.0;    // around the evenly spaced positions
    double aim_offset_fraction = 0.0;    // incident placed uniformly within this share of the half angle
    double heading_noise_deg = 5.0;      // stddev
    double duplicate_fraction = 0.6;     // chance of a near-identical second shot per relevant camera
    double position_jitter_m = 3.0;      // stddev, applied after aiming
    double query_center_jitter_m = 10.0; // stddev of the query center around the incident

    double window_s = 3600.0;            // query time window length
    double time_jitter_s = 300.0;        // stddev of relevant capture times
    double distractor_visd_min_m = 30.0;
    double distractor_visd_max_m = 200.0;
    bool distractors_face_away = false;  // otherwise uniform random headings
    bool distractors_clear_of_incident = true;  // resample until the incident is outside the coverage
    bool distinct_relevant = true;       // resample until a relevant camera overlaps earlier ones below the bound

    double overlap_bound = 0.5;
    std::uint64_t seed = 1;

    /// Noise-free single scene: cameras evenly ringed at 100 m, alpha 30,
    /// reach 1.05, no jitter of any kind and no distractors.
    static SynthConfig zero_noise(std::size_t n_relevant, std::uint64_t seed);
};

void validate(const SynthConfig& cfg);

struct SyntheticScene {
    geo::GeoPoint incident;
    double incident_time_s = 0.0;
    geo::SceneQuery query;
    std::vector<std::string> relevant_ids;
    /// One group per relevant camera: the camera then its duplicate shots.
    std::vector<std::vector<std::string>> relevant_groups;
    std::vector<std::string> distractor_ids;
};

struct SyntheticDataset {
    std::vector<geo::SocSenService> services;  // sorted by id
    io::GroundTruthLabels labels;              // every intra-scene pair
    std::vector<SyntheticScene> scenes;

    std::vector<geo::SceneQuery> queries() const;
    io::SceneTruth scene_truth() const;  // relevant groups, in query order
};

SyntheticDataset generate_synthetic(const SynthConfig& cfg);

/// The label oracle on its own, for one pair and one incident.
bool oracle_composable(const geo::SocSenService& a, const geo::SocSenService& b,
                       const geo::GeoPoint& incident, double window_s, double overlap_bound);

}  // namespace mosaic::synth
