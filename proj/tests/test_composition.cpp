#include <doctest.h>

#include <algorithm>
#include <random>

#include "mosaic/composition.hpp"
#include "mosaic/error.hpp"
#include "support.hpp"

using namespace mosaic;
using namespace mosaic::composition;
using mosaic::testing::kMelbourne;
using mosaic::testing::make_query;
using mosaic::testing::make_service;

namespace {

using Partition = std::vector<std::vector<std::string>>;

/// Components from the transitive closure of the reachability matrix.
Partition floyd_warshall_components(const std::vector<std::string>& ids,
                                    const std::vector<std::pair<int, int>>& edges) {
    const auto n = ids.size();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) reach[i][i] = true;
    for (auto [a, b] : edges) reach[a][b] = reach[b][a] = true;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    Partition out;
    std::vector<bool> done(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (done[i]) continue;
        std::vector<std::string> comp;
        for (std::size_t j = 0; j < n; ++j) {
            if (reach[i][j]) {
                comp.push_back(ids[j]);
                done[j] = true;
            }
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(comp);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Partition sorted(Partition p) {
    std::sort(p.begin(), p.end());
    return p;
}

geo::GeoPoint at(const geo::SceneQuery& q, double east, double north) {
    return geo::LocalProjection(q.center).to_geo({east, north});
}

}  // namespace

TEST_CASE("chain of two composable pairs forms one composite") {
    ComposabilityGraph g;
    g.add_edge("a", "b");
    g.add_edge("b", "c");
    const auto comps = components(g);
    REQUIRE(comps.size() == 1);
    CHECK(comps[0] == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("isolated nodes are singleton composites") {
    ComposabilityGraph g;
    for (auto id : {"x", "y", "z"}) g.add_node(id);
    CHECK(components(g) == Partition{{"x"}, {"y"}, {"z"}});
    CHECK_THROWS_AS(g.add_edge("x", "x"), Error);
}

TEST_CASE("union-find matches floyd-warshall on random graphs") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 50);
        const int m = static_cast<int>(rng() % (2 * n + 1));
        std::vector<std::string> ids;
        for (int i = 0; i < n; ++i) ids.push_back("s" + std::to_string(i));
        std::vector<std::pair<int, int>> edges;
        ComposabilityGraph g;
        for (const auto& id : ids) g.add_node(id);
        for (int e = 0; e < m; ++e) {
            const int a = static_cast<int>(rng() % n), b = static_cast<int>(rng() % n);
            if (a == b) continue;
            edges.emplace_back(a, b);
            g.add_edge(ids[a], ids[b]);
        }
        const auto got = sorted(components(g));
        CHECK(got == floyd_warshall_components(ids, edges));

        // Shuffled insertion order gives the same partition.
        std::shuffle(edges.begin(), edges.end(), rng);
        ComposabilityGraph h;
        for (const auto& id : ids) h.add_node(id);
        for (auto [a, b] : edges) h.add_edge(ids[b], ids[a]);
        CHECK(sorted(components(h)) == got);

        // Closure of the closure-induced graph is unchanged.
        ComposabilityGraph c;
        for (const auto& comp : got) {
            c.add_node(comp[0]);
            for (std::size_t i = 1; i < comp.size(); ++i) c.add_edge(comp[0], comp[i]);
        }
        CHECK(sorted(components(c)) == got);
    }
}

TEST_CASE("closure summarizes members, time and score") {
    std::vector<geo::SocSenService> s = {
        make_service("a", kMelbourne, 0.0, 60.0, 100.0, 10.0),
        make_service("b", geo::destination_point(kMelbourne, 90.0, 50.0), 0.0, 60.0, 100.0, 40.0),
        make_service("c", geo::destination_point(kMelbourne, 90.0, 500.0), 0.0, 60.0, 100.0, 5.0),
    };
    ComposabilityGraph g;
    g.add_edge("a", "b", 0.8);
    g.add_node("c");
    const auto comps = closure(g, s);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0].members == std::vector<std::string>{"a", "b"});
    CHECK(comps[0].time.start_s == 10.0);
    CHECK(comps[0].time.end_s == 40.0);
    CHECK(comps[0].mean_score == doctest::Approx(0.8));
    CHECK(comps[0].coverage_box.max_lat > kMelbourne.lat);
    CHECK(comps[1].mean_score == 0.0);

    g.add_node("ghost");
    CHECK_THROWS_AS(closure(g, s), Error);
}

TEST_CASE("composite selection rules") {
    const auto q = make_query(kMelbourne, 200.0);
    CHECK_THROWS_AS(select_composite(std::span<const CompositeService>{}, q), Error);

    auto box_at = [&](double e0, double n0, double e1, double n1) {
        const auto lo = at(q, e0, n0), hi = at(q, e1, n1);
        return GeoBox{lo.lat, lo.lon, hi.lat, hi.lon};
    };
    CompositeService big{{"p", "q", "r", "s", "t"}, box_at(300, 300, 400, 400), {}, 0.1};
    CompositeService small{{"a", "b", "c"}, box_at(-100, -100, 100, 100), {}, 0.9};
    std::vector<CompositeService> one = {small};
    CHECK(select_composite(one, q).members == small.members);
    std::vector<CompositeService> two = {small, big};
    CHECK(select_composite(two, q).members == big.members);

    // Same size: a 100 x 100 m box fully inside R beats one half outside.
    CompositeService inside{{"m", "n", "o"}, box_at(-50, -50, 50, 50), {}, 0.1};
    CompositeService straddle{{"d", "e", "f"}, box_at(150, 0, 250, 100), {}, 0.9};
    CHECK(coverage_overlap_m2(inside, q) == doctest::Approx(10000.0).epsilon(1e-6));
    CHECK(coverage_overlap_m2(straddle, q) == doctest::Approx(5000.0).epsilon(1e-6));
    std::vector<CompositeService> eq = {straddle, inside};
    CHECK(select_composite(eq, q).members == inside.members);

    CompositeService twin = inside;
    twin.members = {"g", "h", "i"};
    twin.mean_score = 0.5;
    std::vector<CompositeService> by_score = {inside, twin};
    CHECK(select_composite(by_score, q).members == twin.members);
    twin.mean_score = inside.mean_score;
    std::vector<CompositeService> by_id = {inside, twin};
    CHECK(select_composite(by_id, q).members == twin.members);
}

TEST_CASE("single member sits in the middle of the canvas") {
    const auto q = make_query(kMelbourne);
    std::vector<geo::SocSenService> s = {make_service("solo", kMelbourne, 0.0)};
    const auto m = layout(CompositeService{{"solo"}, {}, {}, 0.0}, s, q);
    REQUIRE(m.tiles.size() == 1);
    CHECK(m.tiles[0].canvas_x == 0.5);
    CHECK(m.tiles[0].canvas_y == 0.5);
    CHECK(m.tiles[0].tile_w == kMaxTile);
    CHECK(m.tiles[0].z_order == 0);
}

TEST_CASE("east and west members take the horizontal extremes") {
    const auto q = make_query(kMelbourne);
    std::vector<geo::SocSenService> s = {make_service("w", at(q, -80, 0), 90.0),
                                         make_service("e", at(q, 80, 0), 270.0)};
    const auto m = layout(CompositeService{{"e", "w"}, {}, {}, 0.0}, s, q);
    REQUIRE(m.tiles.size() == 2);
    for (const auto& t : m.tiles) {
        CHECK(t.canvas_x == (t.service_id == "w" ? 0.0 : 1.0));
        CHECK(t.canvas_y == 0.5);
    }
}

TEST_CASE("five members match hand normalization, z-order and tile sizes") {
    const auto q = make_query(kMelbourne);
    // (east, north, time, visd)
    const std::vector<std::tuple<std::string, double, double, double, double>> spec = {
        {"m1", -100, 0, 50, 100}, {"m2", 0, 50, 10, 200}, {"m3", 100, -50, 30, 20},
        {"m4", 50, 100, 10, 100}, {"m5", -50, -100, 0, 100},
    };
    std::vector<geo::SocSenService> s;
    CompositeService c;
    for (const auto& [id, e, n, t, visd] : spec) {
        s.push_back(make_service(id, at(q, e, n), 0.0, 60.0, visd, t));
        c.members.push_back(id);
    }
    const auto m = layout(c, s, q, {"tree", true, 0.5});
    REQUIRE(m.tiles.size() == 5);
    const std::vector<std::string> z_expect = {"m5", "m2", "m4", "m3", "m1"};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(m.tiles[i].service_id == z_expect[i]);
        CHECK(m.tiles[i].z_order == i);
    }
    for (const auto& t : m.tiles) {
        const auto& [id, e, n, time, visd] = *std::find_if(spec.begin(), spec.end(), [&](auto& r) {
            return std::get<0>(r) == t.service_id;
        });
        CHECK(t.canvas_x == doctest::Approx((e + 100.0) / 200.0).epsilon(1e-9));
        CHECK(t.canvas_y == doctest::Approx((n + 100.0) / 200.0).epsilon(1e-9));
        // Same alpha, so the LFOV ratio is the visd ratio to 200 m.
        CHECK(t.tile_w == doctest::Approx(std::clamp(0.5 * visd / 200.0, kMinTile, kMaxTile)));
    }
    CHECK_FALSE(check_manifest(m, c, s).has_value());
    CHECK(m.provenance.model == "tree");
}

TEST_CASE("layout ignores a common translation of all members") {
    const auto q = make_query(kMelbourne, 2000.0);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-300.0, 300.0);
    std::vector<geo::SocSenService> s, moved;
    CompositeService c;
    for (int i = 0; i < 8; ++i) {
        auto svc = make_service("t" + std::to_string(i), at(q, u(rng), u(rng)), 0.0, 60.0, 80.0, i);
        s.push_back(svc);
        svc.location = geo::destination_point(svc.location, 30.0, 700.0);
        moved.push_back(svc);
        c.members.push_back(svc.id);
    }
    const auto a = layout(c, s, q), b = layout(c, moved, q);
    // A 700 m move changes cos(lat) by about 1e-4 relative, which bounds the
    // equirectangular distortion between the two layouts.
    for (std::size_t i = 0; i < a.tiles.size(); ++i) {
        CHECK(a.tiles[i].service_id == b.tiles[i].service_id);
        CHECK(std::abs(a.tiles[i].canvas_x - b.tiles[i].canvas_x) < 1e-4);
        CHECK(std::abs(a.tiles[i].canvas_y - b.tiles[i].canvas_y) < 1e-4);
    }
}

TEST_CASE("manifest check flags members outside the query") {
    const auto q = make_query(kMelbourne, 100.0);
    std::vector<geo::SocSenService> s = {make_service("in", at(q, 10, 10), 0.0),
                                         make_service("out", at(q, 500, 0), 0.0)};
    CompositeService c{{"in", "out"}, {}, {}, 0.0};
    const auto m = layout(c, s, q);
    const auto issue = check_manifest(m, c, s);
    REQUIRE(issue.has_value());
    CHECK(issue->find("outside the query region") != std::string::npos);
}
