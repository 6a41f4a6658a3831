// Pairwise feature rows fed to the composability classifiers.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mosaic/geo.hpp"
#include "mosaic/heuristics.hpp"

namespace mosaic::ml {

inline constexpr std::size_t kFeatureCount = 12;
using FeatureVector = std::array<double, kFeatureCount>;

// Column order of FeatureVector. Changing it changes feature_order_hash()
// and invalidates saved models.
enum class Feature : std::size_t {
    DistM,
    DtS,
    AlphaOverlapDeg,
    OverlapRatio,
    Relevance,
    DirAToPDeg,
    DirBToPDeg,
    VisdAM,
    VisdBM,
    AlphaADeg,
    AlphaBDeg,
    DistMidToPM,
};

std::span<const std::string_view> feature_names();

/// FNV-1a over the comma-joined feature names.
std::uint64_t feature_order_hash();

struct PairFeatureRow {
    std::string id_a;  // id_a < id_b; per-member columns follow this order
    std::string id_b;
    FeatureVector values{};

    double operator[](Feature f) const { return values[static_cast<std::size_t>(f)]; }
};

/// Row for two services; members are put in id order first, so the result
/// does not depend on argument order.
PairFeatureRow build_features(const geo::SocSenService& x, const geo::SocSenService& y,
                              const geo::GeoPoint& p, double relevance);

/// Row for a scored pair, resolving both ids in `services`. Throws
/// MissingService for an unknown id.
PairFeatureRow build_features(const heuristics::ScoredPair& pair,
                              std::span<const geo::SocSenService> services,
                              const geo::GeoPoint& p);

std::vector<PairFeatureRow> build_feature_rows(std::span<const heuristics::ScoredPair> pairs,
                                               std::span<const geo::SocSenService> services,
                                               const geo::GeoPoint& p);

}  // namespace mosaic::ml
