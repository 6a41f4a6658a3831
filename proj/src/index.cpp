#include "mosaic/index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "mosaic/error.hpp"

namespace mosaic::index {

// =============================================================================
// Box3
// =============================================================================

bool Box3::intersects(const Box3& o) const {
    for (int d = 0; d < 3; ++d) {
        if (hi[d] < o.lo[d] || o.hi[d] < lo[d]) return false;
    }
    return true;
}

bool Box3::contains(const Box3& o) const {
    for (int d = 0; d < 3; ++d) {
        if (o.lo[d] < lo[d] || o.hi[d] > hi[d]) return false;
    }
    return true;
}

double Box3::volume() const {
    return (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
}

double Box3::margin() const {
    return (hi[0] - lo[0]) + (hi[1] - lo[1]) + (hi[2] - lo[2]);
}

Box3 Box3::merged(const Box3& o) const {
    Box3 r;
    for (int d = 0; d < 3; ++d) {
        r.lo[d] = std::min(lo[d], o.lo[d]);
        r.hi[d] = std::max(hi[d], o.hi[d]);
    }
    return r;
}

Box3 IndexEntry::box() const {
    return {{x_m, y_m, t_start_s}, {x_m, y_m, t_end_s}};
}

Box3 BoundedRegion::box() const {
    return {{x_min, y_min, t_min}, {x_max, y_max, t_max}};
}

// =============================================================================
// Node and split
// =============================================================================

struct RTree3D::Node {
    bool leaf = true;
    Box3 mbr{};
    std::vector<std::unique_ptr<Node>> children;  // internal nodes
    std::vector<IndexEntry> entries;              // leaves

    std::size_t count() const { return leaf ? entries.size() : children.size(); }

    void recompute_mbr() {
        bool first = true;
        auto take = [&](const Box3& b) {
            mbr = first ? b : mbr.merged(b);
            first = false;
        };
        if (leaf) {
            for (const auto& e : entries) take(e.box());
        } else {
            for (const auto& c : children) take(c->mbr);
        }
    }
};

namespace {

// Growth cost compared lexicographically: volume first, margin as the
// tie-break for boxes that are degenerate along some axis.
struct Cost {
    double volume = 0.0;
    double margin = 0.0;

    friend bool operator<(const Cost& a, const Cost& b) {
        if (a.volume != b.volume) return a.volume < b.volume;
        return a.margin < b.margin;
    }
};

Cost enlargement(const Box3& base, const Box3& add) {
    const Box3 m = base.merged(add);
    return {m.volume() - base.volume(), m.margin() - base.margin()};
}

Cost waste(const Box3& a, const Box3& b) {
    const Box3 m = a.merged(b);
    return {m.volume() - a.volume() - b.volume(), m.margin() - a.margin() - b.margin()};
}

Cost abs_diff(const Cost& a, const Cost& b) {
    return {std::abs(a.volume - b.volume), std::abs(a.margin - b.margin)};
}

const Box3& box_of(const IndexEntry& e, Box3& scratch) {
    scratch = e.box();
    return scratch;
}

const Box3& box_of(const std::unique_ptr<RTree3D::Node>& n, Box3&) { return n->mbr; }

}  // namespace

// Quadratic split of an overfull item list into two groups of at least
// kMinEntries each.
template <typename Item>
static std::pair<std::vector<Item>, std::vector<Item>> quadratic_split(std::vector<Item> items) {
    const std::size_t n = items.size();
    std::vector<Box3> boxes(n);
    for (std::size_t i = 0; i < n; ++i) {
        Box3 scratch;
        boxes[i] = box_of(items[i], scratch);
    }

    // PickSeeds: the pair wasting the most space if grouped together.
    std::size_t s1 = 0, s2 = 1;
    Cost worst{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const Cost w = waste(boxes[i], boxes[j]);
            if (worst < w) {
                worst = w;
                s1 = i;
                s2 = j;
            }
        }
    }

    std::vector<Item> g1, g2;
    Box3 b1 = boxes[s1], b2 = boxes[s2];
    g1.push_back(std::move(items[s1]));
    g2.push_back(std::move(items[s2]));
    std::vector<bool> assigned(n, false);
    assigned[s1] = assigned[s2] = true;
    std::size_t remaining = n - 2;

    const std::size_t m = RTree3D::kMinEntries;
    while (remaining > 0) {
        if (g1.size() + remaining == m || g2.size() + remaining == m) {
            auto& target = (g1.size() + remaining == m) ? g1 : g2;
            auto& tbox = (&target == &g1) ? b1 : b2;
            for (std::size_t i = 0; i < n; ++i) {
                if (assigned[i]) continue;
                tbox = tbox.merged(boxes[i]);
                target.push_back(std::move(items[i]));
                assigned[i] = true;
            }
            break;
        }

        // PickNext: the entry with the strongest preference for one group.
        std::size_t pick = n;
        Cost best_pref{-1.0, -1.0};
        Cost pick_d1, pick_d2;
        for (std::size_t i = 0; i < n; ++i) {
            if (assigned[i]) continue;
            const Cost d1 = enlargement(b1, boxes[i]);
            const Cost d2 = enlargement(b2, boxes[i]);
            const Cost pref = abs_diff(d1, d2);
            if (pick == n || best_pref < pref) {
                best_pref = pref;
                pick = i;
                pick_d1 = d1;
                pick_d2 = d2;
            }
        }

        bool to_first;
        if (pick_d1 < pick_d2) {
            to_first = true;
        } else if (pick_d2 < pick_d1) {
            to_first = false;
        } else if (b1.volume() != b2.volume()) {
            to_first = b1.volume() < b2.volume();
        } else {
            to_first = g1.size() <= g2.size();
        }
        if (to_first) {
            b1 = b1.merged(boxes[pick]);
            g1.push_back(std::move(items[pick]));
        } else {
            b2 = b2.merged(boxes[pick]);
            g2.push_back(std::move(items[pick]));
        }
        assigned[pick] = true;
        --remaining;
    }
    return {std::move(g1), std::move(g2)};
}

namespace {

using NodePtr = std::unique_ptr<RTree3D::Node>;

NodePtr split_node(RTree3D::Node& node) {
    auto sibling = std::make_unique<RTree3D::Node>();
    sibling->leaf = node.leaf;
    if (node.leaf) {
        auto [a, b] = quadratic_split(std::move(node.entries));
        node.entries = std::move(a);
        sibling->entries = std::move(b);
    } else {
        auto [a, b] = quadratic_split(std::move(node.children));
        node.children = std::move(a);
        sibling->children = std::move(b);
    }
    node.recompute_mbr();
    sibling->recompute_mbr();
    return sibling;
}

std::size_t choose_subtree(const RTree3D::Node& node, const Box3& box) {
    std::size_t best = 0;
    Cost best_cost{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    double best_volume = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        const Box3& mbr = node.children[i]->mbr;
        const Cost c = enlargement(mbr, box);
        const double v = mbr.volume();
        if (c < best_cost || (!(best_cost < c) && v < best_volume)) {
            best = i;
            best_cost = c;
            best_volume = v;
        }
    }
    return best;
}

// Returns the new sibling when `node` overflowed and was split.
NodePtr insert_rec(RTree3D::Node& node, IndexEntry entry) {
    const Box3 box = entry.box();
    if (node.leaf) {
        node.mbr = node.entries.empty() ? box : node.mbr.merged(box);
        node.entries.push_back(std::move(entry));
    } else {
        const std::size_t i = choose_subtree(node, box);
        NodePtr split = insert_rec(*node.children[i], std::move(entry));
        if (split) node.children.push_back(std::move(split));
        node.mbr = node.mbr.merged(box);
    }
    if (node.count() > RTree3D::kMaxEntries) return split_node(node);
    return nullptr;
}

void query_rec(const RTree3D::Node& node, const Box3& q, std::vector<std::string>& out,
               QueryStats& stats) {
    ++stats.nodes_visited;
    if (node.leaf) {
        ++stats.leaves_visited;
        for (const auto& e : node.entries) {
            if (e.box().intersects(q)) out.push_back(e.service_id);
        }
        return;
    }
    for (const auto& c : node.children) {
        if (c->mbr.intersects(q)) query_rec(*c, q, out, stats);
    }
}

std::size_t count_nodes(const RTree3D::Node& node) {
    std::size_t n = 1;
    if (!node.leaf) {
        for (const auto& c : node.children) n += count_nodes(*c);
    }
    return n;
}

std::optional<std::string> check_rec(const RTree3D::Node& node, bool is_root, std::size_t depth,
                                     std::optional<std::size_t>& leaf_depth) {
    const std::size_t n = node.count();
    if (n > RTree3D::kMaxEntries) return "node holds " + std::to_string(n) + " entries";
    if (!is_root && n < RTree3D::kMinEntries) {
        return "non-root node underfilled with " + std::to_string(n) + " entries";
    }
    if (is_root && !node.leaf && n < 2) return "internal root has fewer than 2 children";

    Box3 tight;
    bool first = true;
    auto take = [&](const Box3& b) {
        tight = first ? b : tight.merged(b);
        first = false;
    };
    if (node.leaf) {
        if (leaf_depth && *leaf_depth != depth) return "leaves at unequal depth";
        leaf_depth = depth;
        for (const auto& e : node.entries) {
            if (!node.mbr.contains(e.box())) return "entry outside leaf MBR";
            take(e.box());
        }
    } else {
        for (const auto& c : node.children) {
            if (!node.mbr.contains(c->mbr)) return "child MBR not contained in parent MBR";
            take(c->mbr);
            if (auto err = check_rec(*c, false, depth + 1, leaf_depth)) return err;
        }
    }
    if (!first && !(tight == node.mbr)) return "node MBR is not tight";
    return std::nullopt;
}

}  // namespace

// =============================================================================
// RTree3D
// =============================================================================

RTree3D::RTree3D() = default;
RTree3D::~RTree3D() = default;
RTree3D::RTree3D(RTree3D&&) noexcept = default;
RTree3D& RTree3D::operator=(RTree3D&&) noexcept = default;

void RTree3D::insert(IndexEntry entry) {
    for (double v : {entry.x_m, entry.y_m, entry.t_start_s, entry.t_end_s}) {
        if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "index entry coordinates must be finite");
    }
    if (entry.t_start_s > entry.t_end_s) {
        fail(ErrorCode::InvalidArgument, "index entry time interval is reversed");
    }
    if (ids_.contains(entry.service_id)) {
        fail(ErrorCode::DuplicateId, "service id '" + entry.service_id + "' already indexed");
    }
    ids_.insert(entry.service_id);

    if (!root_) root_ = std::make_unique<Node>();
    NodePtr sibling = insert_rec(*root_, std::move(entry));
    if (sibling) {
        auto new_root = std::make_unique<Node>();
        new_root->leaf = false;
        new_root->children.push_back(std::move(root_));
        new_root->children.push_back(std::move(sibling));
        new_root->recompute_mbr();
        root_ = std::move(new_root);
    }
}

std::vector<std::string> RTree3D::range_query(const BoundedRegion& br, QueryStats* stats) const {
    std::vector<std::string> out;
    QueryStats local;
    if (root_ && root_->count() > 0 && root_->mbr.intersects(br.box())) {
        query_rec(*root_, br.box(), out, local);
    }
    if (stats) *stats = local;
    return out;
}

std::size_t RTree3D::height() const {
    std::size_t h = 0;
    for (const Node* n = root_.get(); n; n = n->leaf ? nullptr : n->children.front().get()) ++h;
    return h;
}

std::size_t RTree3D::node_count() const { return root_ ? count_nodes(*root_) : 0; }

std::size_t RTree3D::root_fanout() const { return root_ ? root_->count() : 0; }

std::optional<std::string> RTree3D::check_invariants() const {
    if (!root_) return std::nullopt;
    std::optional<std::size_t> leaf_depth;
    return check_rec(*root_, true, 0, leaf_depth);
}

// =============================================================================
// Construction and queries
// =============================================================================

IndexEntry make_entry(const geo::SocSenService& s, const geo::LocalProjection& proj) {
    const auto xy = proj.to_local(s.location);
    return {s.id, xy.x, xy.y, s.time.start_s, s.time.end_s};
}

RTree3D build(std::span<const geo::SocSenService> services, const geo::GeoPoint& anchor) {
    if (services.empty()) fail(ErrorCode::EmptyIndex, "cannot build an index over zero services");
    const geo::LocalProjection proj(anchor);
    RTree3D tree;
    for (const auto& s : services) tree.insert(make_entry(s, proj));
    return tree;
}

BoundedRegion bounded_region(const geo::SceneQuery& q, const geo::GeoPoint& anchor) {
    const geo::LocalProjection proj(anchor);
    const auto c = proj.to_local(q.center);
    return {c.x - q.half_length_m, c.x + q.half_length_m,
            c.y - q.half_width_m,  c.y + q.half_width_m,
            q.t_start_s,           q.t_end_s};
}

ServiceIndex::ServiceIndex(std::vector<geo::SocSenService> services)
    : services_(std::move(services)),
      projection_(services_.empty() ? geo::GeoPoint{} : geo::centroid(services_)),
      tree_(build(services_, projection_.anchor())) {}

std::vector<geo::SocSenService> ServiceIndex::query(const geo::SceneQuery& q) const {
    const auto ids = tree_.range_query(bounded_region(q, projection_.anchor()));
    std::unordered_set<std::string> hit(ids.begin(), ids.end());
    std::vector<geo::SocSenService> out;
    out.reserve(ids.size());
    for (const auto& s : services_) {
        if (hit.contains(s.id)) out.push_back(s);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
}

}  // namespace mosaic::index
