#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "mosaic/error.hpp"
#include "mosaic/io/metadata.hpp"
#include "mosaic/io/report.hpp"
#include "support.hpp"

using namespace mosaic;
using namespace mosaic::io;
using mosaic::testing::kMelbourne;
using mosaic::testing::make_query;
using mosaic::testing::make_service;

TEST_CASE("record with alpha passes through unchanged") {
    const auto s = parse_record(
        R"({"id":"img-1","lat":-37.81,"lon":144.96,"time_s":1000,"dir_deg":90,"visd_m":120,"alpha_deg":60})");
    CHECK(s.id == "img-1");
    CHECK(s.location.lat == -37.81);
    CHECK(s.location.lon == 144.96);
    CHECK(s.time.start_s == 1000.0);
    CHECK(s.time.end_s == 1000.0);
    CHECK(s.coverage.dir_deg == 90.0);
    CHECK(s.coverage.visd_m == 120.0);
    CHECK(s.coverage.alpha_deg == 60.0);
}

TEST_CASE("record with intrinsics derives alpha") {
    const auto s = parse_record(
        R"({"id":"a","lat":0,"lon":0,"time_s":0,"dir_deg":0,"visd_m":50,"focal_length_mm":18,"sensor_extent_mm":36})");
    // 2 * atan(36 / (2 * 18)) = 2 * atan(1)
    CHECK(s.coverage.alpha_deg == doctest::Approx(90.0).epsilon(1e-12));
}

TEST_CASE("record with a time span") {
    const auto s = parse_record(
        R"({"id":"a","lat":0,"lon":0,"time_start_s":5,"time_end_s":9,"dir_deg":0,"visd_m":50,"alpha_deg":40})");
    CHECK(s.time.start_s == 5.0);
    CHECK(s.time.end_s == 9.0);
}

TEST_CASE("malformed records are rejected") {
    auto code_of = [](const char* line) {
        try {
            parse_record(line);
        } catch (const Error& e) {
            return e.code();
        }
        FAIL("record accepted: " << line);
        return ErrorCode::Io;
    };
    CHECK(code_of(R"({"id":"a","lat":95,"lon":0,"time_s":0,"dir_deg":0,"visd_m":50,"alpha_deg":40})") ==
          ErrorCode::InvalidPoint);
    CHECK(code_of("not json") == ErrorCode::Parse);
    CHECK(code_of(R"({"lat":0,"lon":0,"time_s":0,"dir_deg":0,"visd_m":50,"alpha_deg":40})") == ErrorCode::Parse);
    CHECK(code_of(R"({"id":"a","lat":0,"lon":0,"dir_deg":0,"visd_m":50,"alpha_deg":40})") == ErrorCode::Parse);
    CHECK(code_of(R"({"id":"a","lat":0,"lon":0,"time_s":0,"time_start_s":0,"time_end_s":1,"dir_deg":0,"visd_m":50,"alpha_deg":40})") ==
          ErrorCode::Parse);
    CHECK(code_of(R"({"id":"a","lat":0,"lon":0,"time_s":0,"dir_deg":0,"visd_m":50,"alpha_deg":40,"focal_length_mm":18,"sensor_extent_mm":36})") ==
          ErrorCode::Parse);
    CHECK(code_of(R"({"id":"a","lat":0,"lon":0,"time_s":0,"dir_deg":0,"visd_m":-5,"alpha_deg":40})") ==
          ErrorCode::InvalidCoverage);
    CHECK(code_of(R"({"id":"a b","lat":0,"lon":0,"time_s":0,"dir_deg":0,"visd_m":5,"alpha_deg":40})") ==
          ErrorCode::Parse);
}

TEST_CASE("ingest accounts for every line") {
    std::istringstream in(
        R"({"id":"a","lat":0,"lon":0,"time_s":0,"dir_deg":0,"visd_m":50,"alpha_deg":40})"
        "\n\n"
        R"({"id":"b","lat":95,"lon":0,"time_s":0,"dir_deg":0,"visd_m":50,"alpha_deg":40})"
        "\n"
        "garbage\n"
        "   \n"
        R"({"id":"c","lat":1,"lon":1,"time_s":0,"dir_deg":0,"visd_m":50,"alpha_deg":40})"
        "\n");
    const auto r = ingest(in);
    CHECK(r.total_lines == 6);
    CHECK(r.services.size() == 2);
    CHECK(r.rejected.size() == 2);
    CHECK(r.blank_lines == 2);
    CHECK(r.services.size() + r.rejected.size() + r.blank_lines == r.total_lines);
    CHECK(r.rejected[0].line == 3);
    CHECK(r.rejected[0].message.find("lat") != std::string::npos);
    CHECK(r.rejected[1].line == 4);
}

TEST_CASE("ingest with no valid record is fatal") {
    std::istringstream in("garbage\n{}\n");
    CHECK_THROWS_AS(ingest(in), Error);
    std::istringstream empty("");
    CHECK_THROWS_AS(ingest(empty), Error);
}

TEST_CASE("service records round trip") {
    std::vector<geo::SocSenService> services{make_service("x", kMelbourne, 12.5, 33.0, 80.0, 17.0),
                                             make_service("y", {-37.8, 144.97}, 300.0, 61.0, 140.0, -4.0)};
    services[1].time = {10.0, 20.0};
    std::stringstream io;
    write_services(io, services);
    const auto r = ingest(io);
    REQUIRE(r.services.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(r.services[i].id == services[i].id);
        CHECK(r.services[i].location.lat == services[i].location.lat);
        CHECK(r.services[i].location.lon == services[i].location.lon);
        CHECK(r.services[i].time.start_s == services[i].time.start_s);
        CHECK(r.services[i].time.end_s == services[i].time.end_s);
        CHECK(r.services[i].coverage.dir_deg == services[i].coverage.dir_deg);
        CHECK(r.services[i].coverage.alpha_deg == services[i].coverage.alpha_deg);
        CHECK(r.services[i].coverage.visd_m == services[i].coverage.visd_m);
    }
}

TEST_CASE("labels use canonical pairs and round trip") {
    GroundTruthLabels labels;
    labels.set("b", "a", true);
    labels.set("c", "a", false);
    CHECK(labels.composable("a", "b"));
    CHECK(labels.find("b", "a") == true);
    CHECK_FALSE(labels.composable("a", "c"));
    CHECK_FALSE(labels.find("b", "c").has_value());
    CHECK_FALSE(labels.composable("b", "c"));
    CHECK(labels.positives() == 1);
    CHECK_THROWS_AS(labels.set("a", "a", true), Error);

    std::stringstream io;
    write_labels(io, labels);
    const auto back = read_labels(io);
    CHECK(back.entries() == labels.entries());

    std::istringstream bad("{\"a\":\"x\"}\n");
    CHECK_THROWS_AS(read_labels(bad), Error);
}

TEST_CASE("queries parse, skip comments and round trip") {
    const auto q = parse_query("-37.8101008 144.9634339 10 10 0 3600");
    CHECK(q.center.lat == -37.8101008);
    CHECK(q.center.lon == 144.9634339);
    CHECK(q.half_length_m == 10.0);
    CHECK(q.half_width_m == 10.0);
    CHECK(q.window_s() == 3600.0);
    CHECK_THROWS_AS(parse_query("1 2 3"), Error);
    CHECK_THROWS_AS(parse_query("1 2 3 4 5 6 7"), Error);
    CHECK_THROWS_AS(parse_query("1 2 x 4 5 6"), Error);
    CHECK_THROWS_AS(parse_query("1 2 3 4 9 6"), Error);

    std::istringstream in("# suite\n-37.81 144.96 100 50 0 10\n\n-37.82 144.97 20 20 5 6 # trailing\n");
    const auto qs = read_queries(in);
    REQUIRE(qs.size() == 2);
    CHECK(qs[1].t_start_s == 5.0);

    std::stringstream io;
    write_queries(io, qs);
    const auto back = read_queries(io);
    REQUIRE(back.size() == 2);
    CHECK(back[0].center.lat == qs[0].center.lat);
    CHECK(back[0].half_length_m == qs[0].half_length_m);
    CHECK(back[1].t_end_s == qs[1].t_end_s);

    std::istringstream none("# nothing\n");
    CHECK_THROWS_AS(read_queries(none), Error);
}

TEST_CASE("scene truth round trips") {
    const SceneTruth truth{{{"r0", "b0"}, {"r1"}}, {}, {{"x"}}};
    std::stringstream io;
    write_scene_truth(io, truth);
    CHECK(read_scene_truth(io) == truth);
}

TEST_CASE("manifest document carries schema and tiles") {
    composition::MosaicManifest m;
    m.query = make_query(kMelbourne, 50.0);
    m.provenance = {"tree", true, 0.5};
    m.tiles = {{"a", 0.0, 1.0, 0.25, 0.25, 0}, {"b", 1.0, 0.0, 0.5, 0.5, 1}};
    const auto text = manifest_json(m);
    CHECK(text == manifest_json(m));
    const auto j = nlohmann::json::parse(text);
    CHECK(j["schema"] == kManifestSchema);
    CHECK(j["provenance"]["model"] == "tree");
    REQUIRE(j["tiles"].size() == 2);
    CHECK(j["tiles"][1]["service_id"] == "b");
    CHECK(j["tiles"][1]["canvas_x"] == 1.0);
    CHECK(j["query"]["half_length_m"] == 50.0);
}
