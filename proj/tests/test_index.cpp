#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "mosaic/error.hpp"
#include "mosaic/index.hpp"
#include "support.hpp"

using namespace mosaic;
using namespace mosaic::index;
using mosaic::testing::kMelbourne;
using mosaic::testing::make_service;

namespace {

IndexEntry point_entry(std::string id, double x, double y, double t) {
    return {std::move(id), x, y, t, t};
}

std::set<std::string> linear_scan(const std::vector<IndexEntry>& all, const BoundedRegion& br) {
    std::set<std::string> out;
    for (const auto& e : all) {
        if (e.x_m >= br.x_min && e.x_m <= br.x_max && e.y_m >= br.y_min && e.y_m <= br.y_max &&
            e.t_end_s >= br.t_min && e.t_start_s <= br.t_max) {
            out.insert(e.service_id);
        }
    }
    return out;
}

std::set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("single-entry tree") {
    RTree3D tree;
    CHECK(tree.height() == 0);
    tree.insert(point_entry("a", 1, 2, 3));
    CHECK(tree.height() == 1);
    CHECK(tree.size() == 1);
    CHECK(!tree.check_invariants());

    const auto one = build(std::vector{make_service("x", kMelbourne, 0.0)}, kMelbourne);
    CHECK(one.height() == 1);
    CHECK(one.size() == 1);
}

TEST_CASE("empty build and duplicate ids are rejected") {
    const std::vector<geo::SocSenService> none;
    try {
        build(none, kMelbourne);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyIndex);
    }

    RTree3D tree;
    tree.insert(point_entry("a", 0, 0, 0));
    try {
        tree.insert(point_entry("a", 5, 5, 5));
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DuplicateId);
    }
    CHECK(tree.size() == 1);
}

TEST_CASE("overflowing the root splits it exactly once") {
    RTree3D tree;
    for (std::size_t i = 0; i < RTree3D::kMaxEntries; ++i) {
        tree.insert(point_entry("e" + std::to_string(i), double(i), double(i % 3), 10.0 * i));
    }
    CHECK(tree.height() == 1);
    CHECK(tree.node_count() == 1);
    tree.insert(point_entry("last", 100.0, 100.0, 1000.0));
    CHECK(tree.height() == 2);
    CHECK(tree.root_fanout() == 2);
    CHECK(tree.node_count() == 3);
    CHECK(!tree.check_invariants());
}

TEST_CASE("duplicate locations and times are all retained") {
    std::vector<geo::SocSenService> same;
    for (int i = 0; i < 30; ++i) same.push_back(make_service("s" + std::to_string(i), kMelbourne, 0.0));
    const auto tree = build(same, kMelbourne);
    CHECK(tree.size() == 30);
    CHECK(!tree.check_invariants());
    BoundedRegion br{-1, 1, -1, 1, -1, 1};
    CHECK(tree.range_query(br).size() == 30);
}

TEST_CASE("bounded region from a query") {
    const geo::SceneQuery q{kMelbourne, 10.0, 10.0, 100.0, 200.0};
    const auto br = bounded_region(q, kMelbourne);
    CHECK(br.x_min == doctest::Approx(-10.0));
    CHECK(br.x_max == doctest::Approx(10.0));
    CHECK(br.y_min == doctest::Approx(-10.0));
    CHECK(br.y_max == doctest::Approx(10.0));
    CHECK(br.t_min == 100.0);
    CHECK(br.t_max == 200.0);

    const geo::SceneQuery east{{kMelbourne.lat, kMelbourne.lon + 1.0}, 10.0, 20.0, 0.0, 0.0};
    const auto be = bounded_region(east, kMelbourne);
    const double offset = 111194.92664455874 * std::cos(kMelbourne.lat * M_PI / 180.0);
    CHECK(0.5 * (be.x_min + be.x_max) == doctest::Approx(offset).epsilon(1e-9));
    CHECK(be.y_max - be.y_min == doctest::Approx(40.0));
}

TEST_CASE("zero-thickness time slab matches exact instants") {
    RTree3D tree;
    tree.insert(point_entry("at", 0, 0, 50.0));
    tree.insert(point_entry("before", 0, 0, 49.0));
    tree.insert(IndexEntry{"interval", 0, 0, 40.0, 60.0});
    const auto hit = as_set(tree.range_query({-1, 1, -1, 1, 50.0, 50.0}));
    CHECK(hit == std::set<std::string>{"at", "interval"});
}

TEST_CASE("everything and nothing") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1000.0, 1000.0);
    RTree3D tree;
    for (int i = 0; i < 200; ++i) tree.insert(point_entry(std::to_string(i), u(rng), u(rng), u(rng)));
    CHECK(tree.range_query({-1e4, 1e4, -1e4, 1e4, -1e4, 1e4}).size() == 200);
    CHECK(tree.range_query({5000, 6000, -1e4, 1e4, -1e4, 1e4}).empty());
}

TEST_CASE("range query equals linear scan, invariants hold after every insert") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> xy(-5000.0, 5000.0), t(0.0, 86400.0), dur(0.0, 600.0);
    std::bernoulli_distribution interval(0.2);
    std::vector<IndexEntry> all;
    RTree3D tree;
    for (int i = 0; i < 3000; ++i) {
        const double t0 = t(rng);
        IndexEntry e{"s" + std::to_string(i), xy(rng), xy(rng), t0, interval(rng) ? t0 + dur(rng) : t0};
        all.push_back(e);
        tree.insert(e);
        if (i < 500 || i % 97 == 0) REQUIRE(!tree.check_invariants());
    }
    REQUIRE(!tree.check_invariants());

    std::uniform_real_distribution<double> ext(10.0, 3000.0), text(60.0, 20000.0);
    for (int q = 0; q < 300; ++q) {
        const double cx = xy(rng), cy = xy(rng), ct = t(rng);
        const double ex = ext(rng), ey = ext(rng), et = text(rng);
        const BoundedRegion br{cx - ex, cx + ex, cy - ey, cy + ey, ct - et, ct + et};
        const auto got = tree.range_query(br);
        CHECK(got.size() == as_set(got).size());
        CHECK(as_set(got) == linear_scan(all, br));
    }
}

TEST_CASE("small boxes touch a small fraction of leaves") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1000.0);
    RTree3D tree;
    for (int i = 0; i < 10000; ++i) tree.insert(point_entry(std::to_string(i), u(rng), u(rng), u(rng)));
    const double side = 1000.0 * std::cbrt(0.01);
    std::size_t total = 0;
    for (int q = 0; q < 100; ++q) {
        const double x = u(rng) * 0.75, y = u(rng) * 0.75, t = u(rng) * 0.75;
        QueryStats st;
        tree.range_query({x, x + side, y, y + side, t, t + side}, &st);
        CHECK(st.nodes_visited <= tree.node_count());
        total += st.leaves_visited;
    }
    const double leaves = 10000.0 / RTree3D::kMinEntries;
    CHECK(total / 100.0 < 0.25 * leaves);
}

TEST_CASE("service index answers scene queries") {
    std::vector<geo::SocSenService> services;
    services.push_back(make_service("in", kMelbourne, 0.0, 60.0, 100.0, 10.0));
    services.push_back(make_service("late", kMelbourne, 0.0, 60.0, 100.0, 5000.0));
    services.push_back(make_service("far", geo::destination_point(kMelbourne, 90.0, 1000.0), 0.0, 60.0,
                                    100.0, 10.0));
    const ServiceIndex idx(services);
    const auto hits = idx.query({kMelbourne, 50.0, 50.0, 0.0, 100.0});
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].id == "in");
}
