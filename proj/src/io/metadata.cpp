#include "mosaic/io/metadata.hpp"

#include <json.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mosaic/error.hpp"

namespace mosaic::io {

namespace {

using nlohmann::json;

bool is_blank(std::string_view s) {
    return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

double number_field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) fail(ErrorCode::Parse, std::string("missing field '") + key + "'");
    if (!it->is_number()) fail(ErrorCode::Parse, std::string("field '") + key + "' must be a number");
    const double v = it->get<double>();
    if (!std::isfinite(v)) fail(ErrorCode::Parse, std::string("field '") + key + "' must be finite");
    return v;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
    return out;
}

void check_id(const std::string& id) {
    if (id.empty()) fail(ErrorCode::Parse, "id must not be empty");
    for (char c : id) {
        if (std::isspace(static_cast<unsigned char>(c))) fail(ErrorCode::Parse, "id must not contain whitespace");
    }
}

}  // namespace

geo::SocSenService parse_record(std::string_view json_line) {
    json j;
    try {
        j = json::parse(json_line);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::Parse, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) fail(ErrorCode::Parse, "record must be a JSON object");

    geo::SocSenService s;
    auto id = j.find("id");
    if (id == j.end() || !id->is_string()) fail(ErrorCode::Parse, "missing string field 'id'");
    s.id = id->get<std::string>();
    check_id(s.id);

    s.location = geo::make_point(number_field(j, "lat"), number_field(j, "lon"));

    const bool has_instant = j.contains("time_s");
    const bool has_span = j.contains("time_start_s") || j.contains("time_end_s");
    if (has_instant == has_span) {
        fail(ErrorCode::Parse, "give exactly one of 'time_s' or 'time_start_s'/'time_end_s'");
    }
    if (has_instant) {
        s.time = geo::TimeSpan::instant(number_field(j, "time_s"));
    } else {
        s.time = {number_field(j, "time_start_s"), number_field(j, "time_end_s")};
        if (s.time.start_s > s.time.end_s) fail(ErrorCode::Parse, "time_start_s after time_end_s");
    }

    const bool has_alpha = j.contains("alpha_deg");
    const bool has_intr = j.contains("focal_length_mm") || j.contains("sensor_extent_mm");
    if (has_alpha == has_intr) {
        fail(ErrorCode::Parse, "give exactly one of 'alpha_deg' or 'focal_length_mm'/'sensor_extent_mm'");
    }
    s.coverage.dir_deg = number_field(j, "dir_deg");
    s.coverage.visd_m = number_field(j, "visd_m");
    s.coverage.alpha_deg = has_alpha ? number_field(j, "alpha_deg")
                                     : geo::viewable_angle({number_field(j, "focal_length_mm"),
                                                            number_field(j, "sensor_extent_mm")});
    geo::validate(s.coverage);
    return s;
}

IngestResult ingest(std::istream& in) {
    IngestResult r;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (is_blank(line)) {
            ++r.blank_lines;
            continue;
        }
        try {
            r.services.push_back(parse_record(line));
        } catch (const Error& e) {
            r.rejected.push_back({n, e.what()});
        }
    }
    r.total_lines = n;
    if (r.services.empty()) {
        std::string msg = "no valid metadata records";
        if (!r.rejected.empty()) {
            msg += " (line " + std::to_string(r.rejected[0].line) + ": " + r.rejected[0].message + ")";
        }
        fail(ErrorCode::Parse, msg);
    }
    return r;
}

IngestResult ingest_file(const std::string& path) {
    auto in = open_in(path);
    return ingest(in);
}

std::string to_record(const geo::SocSenService& s) {
    json j;
    j["id"] = s.id;
    j["lat"] = s.location.lat;
    j["lon"] = s.location.lon;
    if (s.time.is_instant()) {
        j["time_s"] = s.time.start_s;
    } else {
        j["time_start_s"] = s.time.start_s;
        j["time_end_s"] = s.time.end_s;
    }
    j["dir_deg"] = s.coverage.dir_deg;
    j["alpha_deg"] = s.coverage.alpha_deg;
    j["visd_m"] = s.coverage.visd_m;
    return j.dump();
}

void write_services(std::ostream& out, std::span<const geo::SocSenService> services) {
    for (const auto& s : services) out << to_record(s) << '\n';
}

void write_services_file(const std::string& path, std::span<const geo::SocSenService> services) {
    auto out = open_out(path);
    write_services(out, services);
}

// -----------------------------------------------------------------------------

void GroundTruthLabels::set(const std::string& a, const std::string& b, bool composable) {
    if (a == b) fail(ErrorCode::InvalidArgument, "label pairs need two distinct ids");
    labels_[a < b ? std::make_pair(a, b) : std::make_pair(b, a)] = composable;
}

std::optional<bool> GroundTruthLabels::find(const std::string& a, const std::string& b) const {
    auto it = labels_.find(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
    if (it == labels_.end()) return std::nullopt;
    return it->second;
}

bool GroundTruthLabels::composable(const std::string& a, const std::string& b) const {
    return find(a, b).value_or(false);
}

std::size_t GroundTruthLabels::positives() const {
    std::size_t n = 0;
    for (const auto& [k, v] : labels_) n += v;
    return n;
}

void write_labels(std::ostream& out, const GroundTruthLabels& labels) {
    for (const auto& [k, v] : labels.entries()) {
        out << json{{"a", k.first}, {"b", k.second}, {"composable", v}}.dump() << '\n';
    }
}

void write_labels_file(const std::string& path, const GroundTruthLabels& labels) {
    auto out = open_out(path);
    write_labels(out, labels);
}

GroundTruthLabels read_labels(std::istream& in) {
    GroundTruthLabels labels;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (is_blank(line)) continue;
        try {
            const auto j = json::parse(line);
            labels.set(j.at("a").get<std::string>(), j.at("b").get<std::string>(), j.at("composable").get<bool>());
        } catch (const json::exception& e) {
            fail(ErrorCode::Parse, "labels line " + std::to_string(n) + ": " + e.what());
        }
    }
    return labels;
}

GroundTruthLabels read_labels_file(const std::string& path) {
    auto in = open_in(path);
    return read_labels(in);
}

// -----------------------------------------------------------------------------

geo::SceneQuery parse_query(std::string_view line) {
    std::istringstream ss{std::string(line)};
    double v[6];
    for (auto& x : v) {
        std::string tok;
        if (!(ss >> tok)) fail(ErrorCode::Parse, "query needs 6 numbers: lat lon l_m w_m t_start t_end");
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
        if (ec != std::errc{} || p != tok.data() + tok.size() || !std::isfinite(x)) {
            fail(ErrorCode::Parse, "bad number '" + tok + "' in query");
        }
    }
    std::string extra;
    if (ss >> extra) fail(ErrorCode::Parse, "unexpected trailing token '" + extra + "' in query");
    geo::SceneQuery q{geo::make_point(v[0], v[1]), v[2], v[3], v[4], v[5]};
    geo::validate(q);
    return q;
}

std::vector<geo::SceneQuery> read_queries(std::istream& in) {
    std::vector<geo::SceneQuery> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (is_blank(line)) continue;
        try {
            out.push_back(parse_query(line));
        } catch (const Error& e) {
            throw Error(e.code(), "query line " + std::to_string(n) + ": " + e.what());
        }
    }
    if (out.empty()) fail(ErrorCode::InvalidQuery, "query file contains no queries");
    return out;
}

std::vector<geo::SceneQuery> read_queries_file(const std::string& path) {
    auto in = open_in(path);
    return read_queries(in);
}

void write_queries(std::ostream& out, std::span<const geo::SceneQuery> queries) {
    out << "# lat lon l_m w_m t_start t_end\n";
    for (const auto& q : queries) {
        out << json(q.center.lat).dump() << ' ' << json(q.center.lon).dump() << ' ' << json(q.half_length_m).dump()
            << ' ' << json(q.half_width_m).dump() << ' ' << json(q.t_start_s).dump() << ' '
            << json(q.t_end_s).dump() << '\n';
    }
}

void write_queries_file(const std::string& path, std::span<const geo::SceneQuery> queries) {
    auto out = open_out(path);
    write_queries(out, queries);
}

// -----------------------------------------------------------------------------

void write_scene_truth(std::ostream& out, const SceneTruth& truth) {
    for (const auto& groups : truth) out << json{{"groups", groups}}.dump() << '\n';
}

void write_scene_truth_file(const std::string& path, const SceneTruth& truth) {
    auto out = open_out(path);
    write_scene_truth(out, truth);
}

SceneTruth read_scene_truth(std::istream& in) {
    SceneTruth truth;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (is_blank(line)) continue;
        try {
            truth.push_back(json::parse(line).at("groups").get<std::vector<std::vector<std::string>>>());
        } catch (const json::exception& e) {
            fail(ErrorCode::Parse, "scene truth line " + std::to_string(n) + ": " + e.what());
        }
    }
    return truth;
}

SceneTruth read_scene_truth_file(const std::string& path) {
    auto in = open_in(path);
    return read_scene_truth(in);
}

}  // namespace mosaic::io
