#include "mosaic/ml/features.hpp"

#include <unordered_map>

#include "mosaic/error.hpp"

namespace mosaic::ml {

namespace {

constexpr std::array<std::string_view, kFeatureCount> kNames{
    "dist_m",          "dt_s",           "alpha_overlap_deg", "overlap_ratio",
    "relevance",       "dir_a_to_p_deg", "dir_b_to_p_deg",    "visd_a_m",
    "visd_b_m",        "alpha_a_deg",    "alpha_b_deg",       "dist_mid_to_p_m",
};

void set(FeatureVector& v, Feature f, double value) { v[static_cast<std::size_t>(f)] = value; }

}  // namespace

std::span<const std::string_view> feature_names() { return kNames; }

std::uint64_t feature_order_hash() {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    bool first = true;
    for (auto name : kNames) {
        if (!first) {
            h ^= static_cast<unsigned char>(',');
            h *= 0x100000001b3ULL;
        }
        first = false;
        for (char c : name) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

PairFeatureRow build_features(const geo::SocSenService& x, const geo::SocSenService& y,
                              const geo::GeoPoint& p, double relevance) {
    const bool swap = y.id < x.id;
    const auto& a = swap ? y : x;
    const auto& b = swap ? x : y;

    PairFeatureRow row{a.id, b.id, {}};
    auto& v = row.values;
    set(v, Feature::DistM, geo::geodesic_distance(a.location, b.location));
    set(v, Feature::DtS, geo::time_gap(a.time, b.time));
    set(v, Feature::AlphaOverlapDeg, geo::angular_overlap(a, b));
    set(v, Feature::OverlapRatio, geo::triangle_overlap_ratio(geo::fov_triangle(a), geo::fov_triangle(b)));
    set(v, Feature::Relevance, relevance);
    set(v, Feature::DirAToPDeg, geo::direction_to_point(a, p));
    set(v, Feature::DirBToPDeg, geo::direction_to_point(b, p));
    set(v, Feature::VisdAM, a.coverage.visd_m);
    set(v, Feature::VisdBM, b.coverage.visd_m);
    set(v, Feature::AlphaADeg, a.coverage.alpha_deg);
    set(v, Feature::AlphaBDeg, b.coverage.alpha_deg);
    set(v, Feature::DistMidToPM, geo::geodesic_distance(geo::geodesic_midpoint(a.location, b.location), p));
    return row;
}

PairFeatureRow build_features(const heuristics::ScoredPair& pair,
                              std::span<const geo::SocSenService> services,
                              const geo::GeoPoint& p) {
    const geo::SocSenService* a = nullptr;
    const geo::SocSenService* b = nullptr;
    for (const auto& s : services) {
        if (s.id == pair.id_a) a = &s;
        if (s.id == pair.id_b) b = &s;
    }
    if (!a) fail(ErrorCode::MissingService, "unknown service id '" + pair.id_a + "'");
    if (!b) fail(ErrorCode::MissingService, "unknown service id '" + pair.id_b + "'");
    return build_features(*a, *b, p, pair.relevance);
}

std::vector<PairFeatureRow> build_feature_rows(std::span<const heuristics::ScoredPair> pairs,
                                               std::span<const geo::SocSenService> services,
                                               const geo::GeoPoint& p) {
    std::unordered_map<std::string, const geo::SocSenService*> by_id;
    for (const auto& s : services) by_id.emplace(s.id, &s);
    auto find = [&](const std::string& id) -> const geo::SocSenService& {
        auto it = by_id.find(id);
        if (it == by_id.end()) fail(ErrorCode::MissingService, "unknown service id '" + id + "'");
        return *it->second;
    };
    std::vector<PairFeatureRow> rows;
    rows.reserve(pairs.size());
    for (const auto& pr : pairs) rows.push_back(build_features(find(pr.id_a), find(pr.id_b), p, pr.relevance));
    return rows;
}

}  // namespace mosaic::ml
