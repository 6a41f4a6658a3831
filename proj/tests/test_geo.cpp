#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "mosaic/diagnostics.hpp"
#include "mosaic/error.hpp"
#include "mosaic/geo.hpp"
#include "support.hpp"

using namespace mosaic;
using namespace mosaic::geo;
using mosaic::testing::kMelbourne;
using mosaic::testing::make_service;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected mosaic::Error");
    return ErrorCode::Io;
}

// Planar point-in-triangle by edge signs; part of the Monte-Carlo oracle.
bool inside(planar::Vec2 p, const std::array<planar::Vec2, 3>& t) {
    const double d1 = planar::cross(t[1] - t[0], p - t[0]);
    const double d2 = planar::cross(t[2] - t[1], p - t[1]);
    const double d3 = planar::cross(t[0] - t[2], p - t[2]);
    const bool neg = d1 < 0 || d2 < 0 || d3 < 0;
    const bool pos = d1 > 0 || d2 > 0 || d3 > 0;
    return !(neg && pos);
}

double monte_carlo_overlap(const std::array<planar::Vec2, 3>& a,
                           const std::array<planar::Vec2, 3>& b, int samples) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto area = [](const auto& t) { return std::abs(planar::cross(t[1] - t[0], t[2] - t[0])) / 2; };
    const auto& small = area(a) <= area(b) ? a : b;
    const auto& other = area(a) <= area(b) ? b : a;
    int hits = 0;
    for (int i = 0; i < samples; ++i) {
        double r1 = u(rng), r2 = u(rng);
        if (r1 + r2 > 1.0) {
            r1 = 1.0 - r1;
            r2 = 1.0 - r2;
        }
        const planar::Vec2 p = small[0] + r1 * (small[1] - small[0]) + r2 * (small[2] - small[0]);
        if (inside(p, other)) ++hits;
    }
    return static_cast<double>(hits) / samples;
}

}  // namespace

TEST_CASE("viewable angle from intrinsics") {
    CHECK(viewable_angle({36.0, 36.0}) == doctest::Approx(53.13010235415598).epsilon(1e-12));
    CHECK(viewable_angle({18.0, 36.0}) == doctest::Approx(90.0).epsilon(1e-12));
    CHECK(viewable_angle({50.0, 24.0}) == doctest::Approx(26.991466561591624).epsilon(1e-12));
    CHECK(code_of([] { viewable_angle({0.0, 36.0}); }) == ErrorCode::InvalidIntrinsics);
    CHECK(code_of([] { viewable_angle({18.0, -1.0}); }) == ErrorCode::InvalidIntrinsics);
}

TEST_CASE("fov chord and height") {
    CHECK(fov_chord(60.0, 100.0) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(fov_chord(90.0, 10.0) == doctest::Approx(14.142135623730950).epsilon(1e-12));
    CHECK(fov_chord(1e-9, 10.0) < 1e-9);
    CHECK(code_of([] { fov_chord(180.0, 10.0); }) == ErrorCode::InvalidCoverage);
    CHECK(code_of([] { fov_chord(0.0, 10.0); }) == ErrorCode::InvalidCoverage);

    CHECK(fov_height(100.0, 100.0) == doctest::Approx(86.60254037844386).epsilon(1e-12));
    CHECK(fov_height(10.0, 20.0) == 0.0);
    CHECK(fov_height(10.0, 0.0) == 10.0);
    CHECK(code_of([] { fov_height(10.0, 20.5); }) == ErrorCode::GeometryInconsistency);
}

TEST_CASE("chord and height agree with visd cos(alpha/2)") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> alpha(1e-3, 179.999);
    std::uniform_real_distribution<double> visd(0.1, 5000.0);
    for (int i = 0; i < 2000; ++i) {
        const double a = alpha(rng), v = visd(rng);
        const double expect = v * std::cos(a / 2.0 * M_PI / 180.0);
        CHECK(std::abs(fov_height(v, fov_chord(a, v)) - expect) <= 1e-9 * v);
    }
}

TEST_CASE("destination point") {
    const GeoPoint o{12.5, -45.0};
    CHECK(destination_point(o, 77.0, 0.0) == o);

    // mpmath evaluation of the law-of-cosines form at 40 digits.
    const auto d = destination_point(kMelbourne, 0.0, 1000.0);
    CHECK(d.lat == doctest::Approx(-37.80110758394081).epsilon(1e-12));
    CHECK(d.lon == doctest::Approx(144.9634339).epsilon(1e-12));

    const auto q = destination_point({0.0, 0.0}, 90.0, M_PI * kEarthRadiusM / 2.0);
    CHECK(std::abs(q.lat) < 1e-9);
    CHECK(q.lon == doctest::Approx(90.0).epsilon(1e-12));

    // Longitude wraps into [-180, 180).
    const auto w = destination_point({0.0, 179.99}, 90.0, 5000.0);
    CHECK(w.lon < 0.0);
    CHECK(w.lon >= -180.0);

    CHECK(code_of([] { destination_point({0, 0}, 0.0, -1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("destination point inverts bearing and distance") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> lat(-70.0, 70.0), lon(-180.0, 180.0);
    std::uniform_real_distribution<double> brg(0.0, 360.0), dist(1.0, 100'000.0);
    for (int i = 0; i < 2000; ++i) {
        const GeoPoint o{lat(rng), lon(rng)};
        const double b = brg(rng), dm = dist(rng);
        const auto p = destination_point(o, b, dm);
        CHECK(std::abs(normalize_difference(initial_bearing(o, p) - b)) < 1e-6);
        if (dm <= 50'000.0) CHECK(std::abs(geodesic_distance(o, p) - dm) <= 1e-3 * dm);
    }
}

TEST_CASE("geodesic distance") {
    CHECK(geodesic_distance(kMelbourne, kMelbourne) == 0.0);
    CHECK(geodesic_distance({0, 0}, {0, 1}) == doctest::Approx(111194.92664455874).epsilon(1e-12));
}

TEST_CASE("fov triangle") {
    const auto s = make_service("a", {0.0, 0.0}, 0.0, 60.0, 1000.0);
    const auto t = fov_triangle(s);
    CHECK(t.apex == s.location);
    CHECK(std::abs(initial_bearing(t.apex, t.left) - 330.0) < 1e-9);
    CHECK(std::abs(initial_bearing(t.apex, t.right) - 30.0) < 1e-9);
    CHECK(geodesic_distance(t.apex, t.left) == doctest::Approx(1000.0).epsilon(1e-9));
    CHECK(geodesic_distance(t.apex, t.right) == doctest::Approx(1000.0).epsilon(1e-9));

    const auto sliver = fov_triangle(make_service("b", kMelbourne, 45.0, 1e-10, 500.0));
    CHECK(geodesic_distance(sliver.left, sliver.right) < 1e-6);
}

TEST_CASE("fov triangle legs and apex angle") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dir(0.0, 360.0), alpha(1.0, 170.0), visd(1.0, 10'000.0);
    for (int i = 0; i < 1000; ++i) {
        const auto s = make_service("x", kMelbourne, dir(rng), alpha(rng), visd(rng));
        const auto t = fov_triangle(s);
        const double v = s.coverage.visd_m;
        CHECK(std::abs(geodesic_distance(t.apex, t.left) - v) <= 1e-6 * v);
        CHECK(std::abs(geodesic_distance(t.apex, t.right) - v) <= 1e-6 * v);
        const double apex = normalize_bearing(initial_bearing(t.apex, t.right) -
                                              initial_bearing(t.apex, t.left));
        CHECK(std::abs(apex - s.coverage.alpha_deg) < 1e-6);
    }
}

TEST_CASE("angular overlap") {
    auto s = [](double dir) { return make_service("s", kMelbourne, dir); };
    CHECK(angular_overlap(s(45), s(45)) == 0.0);
    CHECK(angular_overlap(s(10), s(350)) == doctest::Approx(20.0));
    CHECK(angular_overlap(s(0), s(180)) == 180.0);
    CHECK(angular_overlap(s(180), s(0)) == 180.0);

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> dir(0.0, 360.0);
    for (int i = 0; i < 1000; ++i) {
        const auto a = s(dir(rng)), b = s(dir(rng));
        const double ab = angular_overlap(a, b);
        CHECK(ab > -180.0);
        CHECK(ab <= 180.0);
        if (std::abs(ab) < 180.0) CHECK(ab == doctest::Approx(-angular_overlap(b, a)));
        auto shifted = a;
        shifted.coverage.dir_deg += 720.0;
        CHECK(std::abs(angular_overlap(shifted, b)) == doctest::Approx(std::abs(ab)));
    }
}

TEST_CASE("pair relevance") {
    const auto a = make_service("a", kMelbourne, 30.0, 60.0, 100.0);
    CHECK(pair_relevance(a, make_service("b", kMelbourne, 30.0, 60.0, 100.0), 100.0) == 1.0);
    CHECK(pair_relevance(a, make_service("b", kMelbourne, 210.0, 60.0, 100.0), 100.0) == -1.0);
    CHECK(pair_relevance(a, make_service("b", kMelbourne, 90.0, 60.0, 50.0), 100.0) ==
          doctest::Approx(0.25));
    CHECK(pair_relevance(a, make_service("b", kMelbourne, 120.0), 100.0) == 0.0);

    const std::vector<SocSenService> none;
    CHECK(code_of([&] { pair_relevance(a, a, none); }) == ErrorCode::InvalidContext);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dir(0.0, 360.0), visd(1.0, 100.0);
    for (int i = 0; i < 1000; ++i) {
        const auto x = make_service("x", kMelbourne, dir(rng), 60.0, visd(rng));
        const auto y = make_service("y", kMelbourne, dir(rng), 60.0, visd(rng));
        const double r = pair_relevance(x, y, 100.0);
        CHECK(r == pair_relevance(y, x, 100.0));
        CHECK(r >= -1.0);
        CHECK(r <= 1.0);
        const double c = cos_deg(angular_overlap(x, y));
        CHECK((r > 0) == (c > 0));
        CHECK((r < 0) == (c < 0));
    }
}

TEST_CASE("direction to point") {
    const GeoPoint p = kMelbourne;
    const auto south = destination_point(p, 180.0, 500.0);
    const auto west = destination_point(p, 270.0, 500.0);
    CHECK(direction_to_point(make_service("s", south, 0.0), p) < 1e-6);
    CHECK(direction_to_point(make_service("s", south, 180.0), p) == doctest::Approx(180.0));
    CHECK(direction_to_point(make_service("w", west, 45.0), p) == doctest::Approx(45.0).epsilon(1e-4));

    ScopedWarningCapture capture;
    CHECK(direction_to_point(make_service("c", p, 123.0), p) == 0.0);
    CHECK(capture.messages().size() == 1);
}

TEST_CASE("triangle overlap ratio") {
    const auto t = fov_triangle(make_service("a", kMelbourne, 40.0, 50.0, 300.0));
    CHECK(triangle_overlap_ratio(t, t) == doctest::Approx(1.0).epsilon(1e-12));

    const auto far = fov_triangle(make_service("b", destination_point(kMelbourne, 220.0, 2000.0),
                                               220.0, 50.0, 300.0));
    CHECK(triangle_overlap_ratio(t, far) == 0.0);

    // A small FOV fully inside a larger one counts as full duplication.
    const auto inner = fov_triangle(make_service("c", kMelbourne, 40.0, 20.0, 100.0));
    CHECK(triangle_overlap_ratio(t, inner) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("triangle overlap of half-shifted right triangles matches Monte-Carlo") {
    const LocalProjection proj(kMelbourne);
    const double leg = 200.0;
    const double shift = leg * (1.0 - 1.0 / std::sqrt(2.0));
    const std::array<planar::Vec2, 3> a{{{0, 0}, {leg, 0}, {0, leg}}};
    const std::array<planar::Vec2, 3> b{{{shift, 0}, {leg + shift, 0}, {shift, leg}}};

    const double oracle = monte_carlo_overlap(a, b, 1'000'000);
    CHECK(oracle == doctest::Approx(0.5).epsilon(3e-3));

    const FovTriangle ga{proj.to_geo(a[0]), proj.to_geo(a[1]), proj.to_geo(a[2])};
    const FovTriangle gb{proj.to_geo(b[0]), proj.to_geo(b[1]), proj.to_geo(b[2])};
    const double ratio = triangle_overlap_ratio(ga, gb);
    CHECK(ratio == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(std::abs(ratio - oracle) < 3e-3);
}

TEST_CASE("triangle overlap shrinks as triangles move apart") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> dir(0.0, 360.0), alpha(10.0, 150.0), visd(20.0, 500.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto s = make_service("a", kMelbourne, dir(rng), alpha(rng), visd(rng));
        const auto t1 = fov_triangle(s);
        const double bearing = dir(rng);
        double prev = 1.0 + 1e-9;
        for (int step = 0; step <= 40; ++step) {
            const double d = step * s.coverage.visd_m / 20.0;
            const FovTriangle t2{destination_point(t1.apex, bearing, d),
                                 destination_point(t1.left, bearing, d),
                                 destination_point(t1.right, bearing, d)};
            const double r = triangle_overlap_ratio(t1, t2);
            CHECK(r >= 0.0);
            CHECK(r <= 1.0);
            CHECK(r <= prev + 1e-9);
            prev = r;
        }
    }
}

TEST_CASE("point and coverage validation") {
    CHECK(make_point(10.0, 190.0).lon == doctest::Approx(-170.0));
    CHECK(make_point(10.0, 180.0).lon == -180.0);
    CHECK(code_of([] { make_point(95.0, 0.0); }) == ErrorCode::InvalidPoint);
    CHECK(code_of([] { make_point(NAN, 0.0); }) == ErrorCode::InvalidPoint);
    CHECK(code_of([] { validate(Coverage{360.0, 60.0, 10.0}); }) == ErrorCode::InvalidCoverage);
    CHECK(code_of([] { validate(Coverage{0.0, 0.0, 10.0}); }) == ErrorCode::InvalidCoverage);
    CHECK(code_of([] { validate(Coverage{0.0, 60.0, 0.0}); }) == ErrorCode::InvalidCoverage);
}

TEST_CASE("angle helpers") {
    CHECK(normalize_bearing(-10.0) == 350.0);
    CHECK(normalize_bearing(720.0) == 0.0);
    CHECK(normalize_difference(-180.0) == 180.0);
    CHECK(normalize_difference(270.0) == -90.0);
    CHECK(cos_deg(90.0) == 0.0);
    CHECK(cos_deg(-90.0) == 0.0);
    CHECK(circular_mean(350.0, 10.0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(circular_mean(80.0, 100.0) == doctest::Approx(90.0));
}
