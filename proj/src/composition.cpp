#include "mosaic/composition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "mosaic/error.hpp"

namespace mosaic::composition {

namespace {

using ServiceMap = std::unordered_map<std::string, const geo::SocSenService*>;

ServiceMap map_services(std::span<const geo::SocSenService> services) {
    ServiceMap m;
    for (const auto& s : services) m.emplace(s.id, &s);
    return m;
}

const geo::SocSenService& lookup(const ServiceMap& m, const std::string& id) {
    auto it = m.find(id);
    if (it == m.end()) fail(ErrorCode::MissingService, "no service with id '" + id + "'");
    return *it->second;
}

void extend(GeoBox& box, const geo::GeoPoint& p, bool first) {
    if (first) {
        box = {p.lat, p.lon, p.lat, p.lon};
        return;
    }
    box.min_lat = std::min(box.min_lat, p.lat);
    box.max_lat = std::max(box.max_lat, p.lat);
    box.min_lon = std::min(box.min_lon, p.lon);
    box.max_lon = std::max(box.max_lon, p.lon);
}

double normalized(double v, double lo, double hi) {
    if (!(hi > lo)) return 0.5;
    return std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
}

}  // namespace

void ComposabilityGraph::add_node(const std::string& id) {
    if (id.empty()) fail(ErrorCode::InvalidArgument, "graph node id must not be empty");
    nodes_.insert(id);
}

void ComposabilityGraph::add_edge(const std::string& a, const std::string& b, double score) {
    if (a == b) fail(ErrorCode::InvalidArgument, "self-loop on '" + a + "'");
    add_node(a);
    add_node(b);
    auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    auto [it, inserted] = edges_.emplace(std::move(key), score);
    if (!inserted) it->second = std::max(it->second, score);
}

std::vector<Edge> ComposabilityGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(edges_.size());
    for (const auto& [k, s] : edges_) out.push_back({k.first, k.second, s});
    return out;
}

UnionFind::UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t UnionFind::find(std::size_t x) {
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];
        x = parent_[x];
    }
    return x;
}

bool UnionFind::unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
}

std::vector<std::vector<std::string>> components(const ComposabilityGraph& g) {
    const std::vector<std::string> ids(g.nodes().begin(), g.nodes().end());
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], i);

    UnionFind uf(ids.size());
    for (const auto& e : g.edges()) uf.unite(index.at(e.a), index.at(e.b));

    std::map<std::size_t, std::vector<std::string>> groups;
    for (std::size_t i = 0; i < ids.size(); ++i) groups[uf.find(i)].push_back(ids[i]);

    std::vector<std::vector<std::string>> out;
    for (auto& [root, members] : groups) out.push_back(std::move(members));
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.front() < y.front(); });
    return out;
}

std::vector<CompositeService> closure(const ComposabilityGraph& g,
                                      std::span<const geo::SocSenService> services) {
    const auto by_id = map_services(services);
    auto parts = components(g);

    std::unordered_map<std::string, std::size_t> part_of;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        for (const auto& id : parts[i]) part_of.emplace(id, i);
    }
    std::vector<double> score_sum(parts.size(), 0.0);
    std::vector<std::size_t> edge_count(parts.size(), 0);
    for (const auto& e : g.edges()) {
        const auto p = part_of.at(e.a);
        score_sum[p] += e.score;
        ++edge_count[p];
    }

    std::vector<CompositeService> out;
    out.reserve(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
        CompositeService c;
        c.members = std::move(parts[i]);
        bool first = true;
        for (const auto& id : c.members) {
            const auto& s = lookup(by_id, id);
            const auto tri = geo::fov_triangle(s);
            for (const auto& v : {tri.apex, tri.left, tri.right}) {
                extend(c.coverage_box, v, first);
                first = false;
            }
            if (&id == &c.members.front()) {
                c.time = s.time;
            } else {
                c.time.start_s = std::min(c.time.start_s, s.time.start_s);
                c.time.end_s = std::max(c.time.end_s, s.time.end_s);
            }
        }
        c.mean_score = edge_count[i] > 0 ? score_sum[i] / static_cast<double>(edge_count[i]) : 0.0;
        out.push_back(std::move(c));
    }
    return out;
}

double coverage_overlap_m2(const CompositeService& c, const geo::SceneQuery& q) {
    const geo::LocalProjection proj(q.center);
    const auto lo = proj.to_local({c.coverage_box.min_lat, c.coverage_box.min_lon});
    const auto hi = proj.to_local({c.coverage_box.max_lat, c.coverage_box.max_lon});
    const double w = std::min(hi.x, q.half_length_m) - std::max(lo.x, -q.half_length_m);
    const double h = std::min(hi.y, q.half_width_m) - std::max(lo.y, -q.half_width_m);
    return w > 0.0 && h > 0.0 ? w * h : 0.0;
}

namespace {

struct Ranked {
    const CompositeService* c;
    double overlap;
};

bool ranks_before(const Ranked& x, const Ranked& y) {
    if (x.c->members.size() != y.c->members.size()) return x.c->members.size() > y.c->members.size();
    if (x.overlap != y.overlap) return x.overlap > y.overlap;
    if (x.c->mean_score != y.c->mean_score) return x.c->mean_score > y.c->mean_score;
    return x.c->members.front() < y.c->members.front();
}

std::vector<Ranked> ranked(std::span<const CompositeService> composites, const geo::SceneQuery& q) {
    std::vector<Ranked> r;
    r.reserve(composites.size());
    for (const auto& c : composites) {
        if (c.members.empty()) fail(ErrorCode::InvalidArgument, "composite without members");
        r.push_back({&c, coverage_overlap_m2(c, q)});
    }
    std::sort(r.begin(), r.end(), ranks_before);
    return r;
}

}  // namespace

const CompositeService& select_composite(std::span<const CompositeService> composites,
                                         const geo::SceneQuery& q) {
    if (composites.empty()) fail(ErrorCode::NoComposition, "no composite services to choose from");
    return *ranked(composites, q).front().c;
}

std::vector<CompositeService> rank_composites(std::span<const CompositeService> composites,
                                              const geo::SceneQuery& q) {
    std::vector<CompositeService> out;
    for (const auto& r : ranked(composites, q)) out.push_back(*r.c);
    return out;
}

MosaicManifest layout(const CompositeService& composite, std::span<const geo::SocSenService> services,
                      const geo::SceneQuery& q, const Provenance& provenance) {
    if (composite.members.empty()) fail(ErrorCode::InvalidArgument, "cannot lay out an empty composite");
    const auto by_id = map_services(services);
    const geo::LocalProjection proj(q.center);

    struct Placed {
        const geo::SocSenService* s;
        planar::Vec2 pos;
        double lfov;
    };
    std::vector<Placed> placed;
    for (const auto& id : composite.members) {
        const auto& s = lookup(by_id, id);
        placed.push_back({&s, proj.to_local(s.location), geo::fov_chord(s.coverage.alpha_deg, s.coverage.visd_m)});
    }

    double min_x = placed[0].pos.x, max_x = min_x, min_y = placed[0].pos.y, max_y = min_y, max_lfov = 0.0;
    for (const auto& p : placed) {
        min_x = std::min(min_x, p.pos.x);
        max_x = std::max(max_x, p.pos.x);
        min_y = std::min(min_y, p.pos.y);
        max_y = std::max(max_y, p.pos.y);
        max_lfov = std::max(max_lfov, p.lfov);
    }

    std::sort(placed.begin(), placed.end(), [](const Placed& a, const Placed& b) {
        if (a.s->time.start_s != b.s->time.start_s) return a.s->time.start_s < b.s->time.start_s;
        return a.s->id < b.s->id;
    });

    MosaicManifest m;
    m.query = q;
    m.provenance = provenance;
    for (std::size_t z = 0; z < placed.size(); ++z) {
        const auto& p = placed[z];
        const double side = std::clamp(0.5 * p.lfov / max_lfov, kMinTile, kMaxTile);
        m.tiles.push_back({p.s->id, normalized(p.pos.x, min_x, max_x), normalized(p.pos.y, min_y, max_y), side,
                           side, z});
    }
    return m;
}

std::optional<std::string> check_manifest(const MosaicManifest& m, const CompositeService& composite,
                                          std::span<const geo::SocSenService> services, double tolerance_m) {
    const auto by_id = map_services(services);
    const std::set<std::string> members(composite.members.begin(), composite.members.end());
    const geo::LocalProjection proj(m.query.center);
    std::vector<bool> seen(m.tiles.size(), false);
    for (const auto& t : m.tiles) {
        const auto where = "tile '" + t.service_id + "': ";
        if (!members.contains(t.service_id)) return where + "not a member of the composite";
        if (!(t.canvas_x >= 0.0 && t.canvas_x <= 1.0 && t.canvas_y >= 0.0 && t.canvas_y <= 1.0)) {
            return where + "canvas position out of bounds";
        }
        if (!(t.tile_w > 0.0 && t.tile_w <= 1.0 && t.tile_h > 0.0 && t.tile_h <= 1.0)) {
            return where + "tile size out of bounds";
        }
        if (t.z_order >= seen.size() || seen[t.z_order]) return where + "z_order is not a permutation";
        seen[t.z_order] = true;

        auto it = by_id.find(t.service_id);
        if (it == by_id.end()) return where + "unknown service";
        const auto& s = *it->second;
        const auto pos = proj.to_local(s.location);
        if (std::abs(pos.x) > m.query.half_length_m + tolerance_m ||
            std::abs(pos.y) > m.query.half_width_m + tolerance_m) {
            return where + "outside the query region";
        }
        if (s.time.end_s < m.query.t_start_s || s.time.start_s > m.query.t_end_s) {
            return where + "outside the query time window";
        }
    }
    if (m.tiles.size() != members.size()) return "manifest does not cover every member";
    return std::nullopt;
}

}  // namespace mosaic::composition
