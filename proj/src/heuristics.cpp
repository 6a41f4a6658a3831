#include "mosaic/heuristics.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "mosaic/error.hpp"

namespace mosaic::heuristics {

namespace {

bool ids_less(const ScoredPair& a, const ScoredPair& b) {
    if (a.id_a != b.id_a) return a.id_a < b.id_a;
    return a.id_b < b.id_b;
}

std::vector<geo::SocSenService> sorted_by_id(std::span<const geo::SocSenService> services) {
    std::vector<geo::SocSenService> out(services.begin(), services.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
}

}  // namespace

std::vector<ScoredPair> score_pairs(std::span<const geo::SocSenService> services,
                                    const geo::GeoPoint& p) {
    if (services.size() < 2) {
        fail(ErrorCode::InsufficientCandidates,
             "pair scoring needs at least 2 services, got " + std::to_string(services.size()));
    }
    const auto sorted = sorted_by_id(services);
    const double visd_max = geo::max_visd(sorted);

    std::vector<ScoredPair> pairs;
    pairs.reserve(sorted.size() * (sorted.size() - 1) / 2);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        for (std::size_t j = i + 1; j < sorted.size(); ++j) {
            const auto& a = sorted[i];
            const auto& b = sorted[j];
            if (a.id == b.id) fail(ErrorCode::DuplicateId, "duplicate service id '" + a.id + "'");
            ScoredPair sp;
            sp.id_a = a.id;
            sp.id_b = b.id;
            sp.distance_m = geo::geodesic_distance(a.location, b.location);
            sp.relevance = geo::pair_relevance(a, b, visd_max);
            const auto mid = geo::geodesic_midpoint(a.location, b.location);
            const double heading = geo::circular_mean(a.coverage.dir_deg, b.coverage.dir_deg);
            sp.pair_direction_deg = geo::direction_to_point(heading, mid, p);
            sp.pair_distance_to_center_m = geo::geodesic_distance(mid, p);
            pairs.push_back(std::move(sp));
        }
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) {
        if (x.relevance != y.relevance) return x.relevance > y.relevance;
        return ids_less(x, y);
    });
    return pairs;
}

std::vector<ScoredPair> filter_relevant(std::span<const ScoredPair> pairs) {
    std::vector<ScoredPair> out;
    std::copy_if(pairs.begin(), pairs.end(), std::back_inserter(out),
                 [](const ScoredPair& p) { return p.relevance > 0.0; });
    return out;
}

double position_relevance(const ScoredPair& pair, double scale_m) {
    if (!(scale_m > 0.0)) fail(ErrorCode::InvalidArgument, "position scale must be positive");
    return geo::cos_deg(pair.pair_direction_deg) / (1.0 + pair.pair_distance_to_center_m / scale_m);
}

void rank_by_position(std::vector<ScoredPair>& pairs, double scale_m) {
    for (auto& p : pairs) p.position_relevance = position_relevance(p, scale_m);
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) {
        if (x.position_relevance != y.position_relevance) {
            return x.position_relevance > y.position_relevance;
        }
        return ids_less(x, y);
    });
}

DedupeResult dedupe_overlap(std::span<const ScoredPair> pairs,
                            std::span<const geo::SocSenService> services,
                            const geo::SceneQuery& q, double threshold) {
    std::unordered_map<std::string, const geo::SocSenService*> by_id;
    for (const auto& s : services) by_id.emplace(s.id, &s);
    auto lookup = [&](const std::string& id) -> const geo::SocSenService& {
        auto it = by_id.find(id);
        if (it == by_id.end()) fail(ErrorCode::MissingService, "unknown service id '" + id + "'");
        return *it->second;
    };

    struct Candidate {
        double overlap;
        const ScoredPair* pair;
    };
    std::vector<Candidate> dupes;
    for (const auto& p : pairs) {
        const auto& a = lookup(p.id_a);
        const auto& b = lookup(p.id_b);
        if (geo::time_gap(a.time, b.time) > q.window_s()) continue;
        const double overlap = geo::triangle_overlap_ratio(geo::fov_triangle(a), geo::fov_triangle(b));
        if (overlap >= threshold) dupes.push_back({overlap, &p});
    }
    std::stable_sort(dupes.begin(), dupes.end(), [](const Candidate& x, const Candidate& y) {
        if (x.overlap != y.overlap) return x.overlap > y.overlap;
        return ids_less(*x.pair, *y.pair);
    });

    std::unordered_set<std::string> removed;
    std::vector<std::string> removed_order;
    for (const auto& c : dupes) {
        const auto& ida = c.pair->id_a;
        const auto& idb = c.pair->id_b;
        if (removed.contains(ida) || removed.contains(idb)) continue;
        const double da = geo::geodesic_distance(lookup(ida).location, q.center);
        const double db = geo::geodesic_distance(lookup(idb).location, q.center);
        // Equal distances drop the larger id.
        const std::string& loser = (da > db) ? ida : idb;
        removed.insert(loser);
        removed_order.push_back(loser);
    }

    DedupeResult out;
    for (const auto& s : services) {
        if (!removed.contains(s.id)) out.services.push_back(s);
    }
    for (const auto& p : pairs) {
        if (!removed.contains(p.id_a) && !removed.contains(p.id_b)) out.pairs.push_back(p);
    }
    out.removed = std::move(removed_order);
    return out;
}

HeuristicOutput run_heuristics(std::span<const geo::SocSenService> services,
                               const geo::SceneQuery& q, const HeuristicConfig& cfg) {
    const auto sorted = sorted_by_id(services);
    auto scored = score_pairs(sorted, q.center);

    HeuristicOutput out;
    out.scored_pairs = scored.size();
    auto relevant = filter_relevant(scored);
    out.relevant_pairs = relevant.size();
    rank_by_position(relevant, q.diagonal_scale_m());

    auto deduped = dedupe_overlap(relevant, sorted, q, cfg.overlap_threshold);
    out.redundant = std::move(deduped.removed);
    out.pairs = std::move(deduped.pairs);
    if (cfg.top_k && out.pairs.size() > *cfg.top_k) out.pairs.resize(*cfg.top_k);

    std::unordered_set<std::string> used;
    for (const auto& p : out.pairs) {
        used.insert(p.id_a);
        used.insert(p.id_b);
    }
    for (const auto& s : deduped.services) {
        if (used.contains(s.id)) out.services.push_back(s);
    }
    return out;
}

HeuristicOutput pass_through(std::span<const geo::SocSenService> services,
                             const geo::SceneQuery& q) {
    HeuristicOutput out;
    out.services = sorted_by_id(services);
    out.pairs = score_pairs(out.services, q.center);
    for (auto& p : out.pairs) p.position_relevance = position_relevance(p, q.diagonal_scale_m());
    out.scored_pairs = out.pairs.size();
    out.relevant_pairs = out.pairs.size();
    return out;
}

}  // namespace mosaic::heuristics
