// Spatio-temporal 3D R-tree over (x, y, t) with bounded-region queries.
#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "mosaic/geo.hpp"

namespace mosaic::index {

/// Axis-aligned box over (x meters, y meters, t seconds).
struct Box3 {
    std::array<double, 3> lo{};
    std::array<double, 3> hi{};

    bool intersects(const Box3& o) const;
    bool contains(const Box3& o) const;
    double volume() const;
    double margin() const;
    Box3 merged(const Box3& o) const;

    friend bool operator==(const Box3&, const Box3&) = default;
};

/// Leaf payload. Interval-timed services occupy [t_start_s, t_end_s].
struct IndexEntry {
    std::string service_id;
    double x_m = 0.0;
    double y_m = 0.0;
    double t_start_s = 0.0;
    double t_end_s = 0.0;

    Box3 box() const;
};

/// The query cube: projected query rectangle swept over its time window.
struct BoundedRegion {
    double x_min = 0.0, x_max = 0.0;
    double y_min = 0.0, y_max = 0.0;
    double t_min = 0.0, t_max = 0.0;

    Box3 box() const;
};

struct QueryStats {
    std::size_t nodes_visited = 0;
    std::size_t leaves_visited = 0;
};

/// Guttman R-tree with quadratic split. Insert-only; once built it is
/// read-only and queries may run concurrently.
class RTree3D {
public:
    static constexpr std::size_t kMaxEntries = 8;
    static constexpr std::size_t kMinEntries = 3;

    RTree3D();
    ~RTree3D();
    RTree3D(RTree3D&&) noexcept;
    RTree3D& operator=(RTree3D&&) noexcept;

    /// Throws DuplicateId if the service id is already indexed.
    void insert(IndexEntry entry);

    std::vector<std::string> range_query(const BoundedRegion& br, QueryStats* stats = nullptr) const;

    std::size_t size() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }
    /// Number of levels; 0 for an empty tree, 1 when the root is a leaf.
    std::size_t height() const;
    std::size_t node_count() const;
    /// Entry count of the root (children for an internal root).
    std::size_t root_fanout() const;

    /// Description of the first violated structural invariant, if any:
    /// fill factors, tight MBR containment and uniform leaf depth.
    std::optional<std::string> check_invariants() const;

    struct Node;

private:
    std::unique_ptr<Node> root_;
    std::unordered_set<std::string> ids_;
};

IndexEntry make_entry(const geo::SocSenService& s, const geo::LocalProjection& proj);

/// Throws EmptyIndex for an empty service list.
RTree3D build(std::span<const geo::SocSenService> services, const geo::GeoPoint& anchor);

BoundedRegion bounded_region(const geo::SceneQuery& q, const geo::GeoPoint& anchor);

/// Projection, tree and the service store behind it.
class ServiceIndex {
public:
    /// Anchors the projection at the dataset centroid.
    explicit ServiceIndex(std::vector<geo::SocSenService> services);

    /// Services whose location and time fall inside the query's cube,
    /// sorted by id.
    std::vector<geo::SocSenService> query(const geo::SceneQuery& q) const;

    const geo::GeoPoint& anchor() const { return projection_.anchor(); }
    const RTree3D& tree() const { return tree_; }
    const std::vector<geo::SocSenService>& services() const { return services_; }

private:
    std::vector<geo::SocSenService> services_;
    geo::LocalProjection projection_;
    RTree3D tree_;
};

}  // namespace mosaic::index
