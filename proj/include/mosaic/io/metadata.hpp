// Line-delimited JSON metadata, ground-truth labels and query files.
//
// Metadata record (one JSON object per line):
//   {"id": "img-1", "lat": -37.81, "lon": 144.96, "time_s": 1000,
//    "dir_deg": 90, "visd_m": 120, "alpha_deg": 60}
// Time is either "time_s" or the pair "time_start_s"/"time_end_s". The view
// angle is either "alpha_deg" or the pair "focal_length_mm"/"sensor_extent_mm".
#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mosaic/geo.hpp"

namespace mosaic::io {

struct IngestIssue {
    std::size_t line = 0;  // 1-based
    std::string message;
};

struct IngestResult {
    std::vector<geo::SocSenService> services;
    std::vector<IngestIssue> rejected;
    std::size_t total_lines = 0;
    std::size_t blank_lines = 0;  // whitespace-only, neither accepted nor rejected
};

/// Parses one record. Throws Error (Parse or the geometry code) on bad input.
geo::SocSenService parse_record(std::string_view json_line);

/// Every non-blank line ends up in `services` or `rejected`. Throws Parse when
/// no line is accepted.
IngestResult ingest(std::istream& in);
IngestResult ingest_file(const std::string& path);

std::string to_record(const geo::SocSenService& s);
void write_services(std::ostream& out, std::span<const geo::SocSenService> services);
void write_services_file(const std::string& path, std::span<const geo::SocSenService> services);

/// Pairwise ground truth keyed by canonical (smaller id, larger id).
class GroundTruthLabels {
public:
    void set(const std::string& a, const std::string& b, bool composable);
    std::optional<bool> find(const std::string& a, const std::string& b) const;
    /// Unlabeled pairs count as non-composable.
    bool composable(const std::string& a, const std::string& b) const;

    std::size_t size() const { return labels_.size(); }
    std::size_t positives() const;
    const std::map<std::pair<std::string, std::string>, bool>& entries() const { return labels_; }

private:
    std::map<std::pair<std::string, std::string>, bool> labels_;
};

/// One {"a": .., "b": .., "composable": true|false} object per line.
void write_labels(std::ostream& out, const GroundTruthLabels& labels);
void write_labels_file(const std::string& path, const GroundTruthLabels& labels);
GroundTruthLabels read_labels(std::istream& in);
GroundTruthLabels read_labels_file(const std::string& path);

/// Query lines: `lat lon l_m w_m t_start t_end`; `#` starts a comment.
geo::SceneQuery parse_query(std::string_view line);
std::vector<geo::SceneQuery> read_queries(std::istream& in);
std::vector<geo::SceneQuery> read_queries_file(const std::string& path);
void write_queries(std::ostream& out, std::span<const geo::SceneQuery> queries);
void write_queries_file(const std::string& path, std::span<const geo::SceneQuery> queries);

/// Relevant service groups per query, one {"groups": [[id, ..], ..]} object
/// per line in query order.
using SceneTruth = std::vector<std::vector<std::vector<std::string>>>;
void write_scene_truth(std::ostream& out, const SceneTruth& truth);
void write_scene_truth_file(const std::string& path, const SceneTruth& truth);
SceneTruth read_scene_truth(std::istream& in);
SceneTruth read_scene_truth_file(const std::string& path);

}  // namespace mosaic::io
