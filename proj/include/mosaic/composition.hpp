// Transitive composition of pairwise-composable services and mosaic layout.
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mosaic/geo.hpp"

namespace mosaic::composition {

struct Edge {
    std::string a;  // a < b
    std::string b;
    double score = 0.0;
};

/// Undirected, no self-loops. Adding an edge adds its endpoints as nodes; a
/// repeated edge keeps the higher score.
class ComposabilityGraph {
public:
    void add_node(const std::string& id);
    void add_edge(const std::string& a, const std::string& b, double score = 1.0);

    const std::set<std::string>& nodes() const { return nodes_; }
    std::vector<Edge> edges() const;  // sorted by (a, b)
    std::size_t edge_count() const { return edges_.size(); }

private:
    std::set<std::string> nodes_;
    std::map<std::pair<std::string, std::string>, double> edges_;
};

/// Disjoint-set forest over dense indices, path halving plus union by size.
class UnionFind {
public:
    explicit UnionFind(std::size_t n);
    std::size_t find(std::size_t x);
    bool unite(std::size_t a, std::size_t b);

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

/// Connected components; each sorted, and the list sorted by first member.
std::vector<std::vector<std::string>> components(const ComposabilityGraph& g);

struct GeoBox {
    double min_lat = 0.0;
    double min_lon = 0.0;
    double max_lat = 0.0;
    double max_lon = 0.0;
};

struct CompositeService {
    std::vector<std::string> members;  // sorted, non-empty
    GeoBox coverage_box;               // over every member's coverage triangle
    geo::TimeSpan time;                // hull of member capture times
    double mean_score = 0.0;           // mean edge score inside the component, 0 for singletons
};

/// One composite per connected component. Throws MissingService when a
/// node has no matching service.
std::vector<CompositeService> closure(const ComposabilityGraph& g,
                                      std::span<const geo::SocSenService> services);

/// Area in m² shared by the composite's coverage box and the query rectangle.
double coverage_overlap_m2(const CompositeService& c, const geo::SceneQuery& q);

/// Most members, then most coverage overlap with the query rectangle, then
/// highest mean score, then smallest first member id. Throws NoComposition
/// for an empty list.
const CompositeService& select_composite(std::span<const CompositeService> composites,
                                         const geo::SceneQuery& q);

/// All composites in selection order (the first is select_composite's pick).
std::vector<CompositeService> rank_composites(std::span<const CompositeService> composites,
                                              const geo::SceneQuery& q);

struct Tile {
    std::string service_id;
    double canvas_x = 0.5;  // 0 = westernmost member, 1 = easternmost
    double canvas_y = 0.5;  // 0 = southernmost member, 1 = northernmost
    double tile_w = 0.5;
    double tile_h = 0.5;
    std::size_t z_order = 0;  // later captures on top
};

struct Provenance {
    std::string model;
    bool heuristics = true;
    double overlap_threshold = 0.5;
};

struct MosaicManifest {
    geo::SceneQuery query;
    std::vector<Tile> tiles;  // by z_order
    Provenance provenance;
};

inline constexpr double kMinTile = 0.05;
inline constexpr double kMaxTile = 0.5;

/// Places each member by min-max normalizing its query-local east/north
/// position over the members (a degenerate axis maps to 0.5). Tiles are
/// square with side 0.5 · LFOV / largest LFOV, clamped to [kMinTile,
/// kMaxTile]; z_order ranks capture start time, ties by id.
MosaicManifest layout(const CompositeService& composite, std::span<const geo::SocSenService> services,
                      const geo::SceneQuery& q, const Provenance& provenance = {});

/// Checks the manifest invariants: canvas bounds, z_order permutation,
/// membership, and every tile's service inside the query region and window
/// (with `tolerance_m` slack). Returns a description of the first violation.
std::optional<std::string> check_manifest(const MosaicManifest& m, const CompositeService& composite,
                                          std::span<const geo::SocSenService> services,
                                          double tolerance_m = 1.0);

}  // namespace mosaic::composition
