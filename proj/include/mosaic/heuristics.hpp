// Rank-based heuristic filtering of candidate service pairs.
//
// Pipeline: score every pair by directional relevance, keep the strictly
// positive ones, rank them by position relevance toward the query center,
// then drop near-duplicate coverage.
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mosaic/geo.hpp"

namespace mosaic::heuristics {

struct ScoredPair {
    std::string id_a;  // id_a < id_b
    std::string id_b;
    double distance_m = 0.0;
    double relevance = 0.0;
    double position_relevance = 0.0;
    double pair_direction_deg = 0.0;  // mean heading vs. bearing to the center
    double pair_distance_to_center_m = 0.0;
};

struct HeuristicConfig {
    double overlap_threshold = 0.5;
    std::optional<std::size_t> top_k;  // keep only the K best-ranked pairs
};

struct HeuristicOutput {
    std::vector<geo::SocSenService> services;  // sorted by id
    std::vector<ScoredPair> pairs;             // ranked
    std::size_t scored_pairs = 0;
    std::size_t relevant_pairs = 0;
    std::vector<std::string> redundant;  // ids removed as duplicated coverage
};

/// One pair per unordered service pair, sorted by relevance (highest first,
/// ties by ids). Throws InsufficientCandidates for fewer than 2 services.
std::vector<ScoredPair> score_pairs(std::span<const geo::SocSenService> services,
                                    const geo::GeoPoint& p);

/// Pairs with relevance strictly above 0.
std::vector<ScoredPair> filter_relevant(std::span<const ScoredPair> pairs);

/// cos(pair direction) / (1 + distance-to-center / scale).
double position_relevance(const ScoredPair& pair, double scale_m);

/// Fills position_relevance and sorts descending (ties by ids).
void rank_by_position(std::vector<ScoredPair>& pairs, double scale_m);

struct DedupeResult {
    std::vector<geo::SocSenService> services;
    std::vector<ScoredPair> pairs;
    std::vector<std::string> removed;
};

/// Greedy duplicate removal: pairs whose coverage triangles overlap by at
/// least `threshold` and whose capture times are within the query window lose
/// the member farther from the query center. Pairs are visited by descending
/// overlap, ties by ids. Surviving pairs keep their input order.
DedupeResult dedupe_overlap(std::span<const ScoredPair> pairs,
                            std::span<const geo::SocSenService> services,
                            const geo::SceneQuery& q, double threshold = 0.5);

/// The full filter. Services that end up in no surviving pair are dropped.
HeuristicOutput run_heuristics(std::span<const geo::SocSenService> services,
                               const geo::SceneQuery& q, const HeuristicConfig& cfg = {});

/// Heuristics switched off: every pair, every service, scored but unfiltered.
HeuristicOutput pass_through(std::span<const geo::SocSenService> services,
                             const geo::SceneQuery& q);

}  // namespace mosaic::heuristics
