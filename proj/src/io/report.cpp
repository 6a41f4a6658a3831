#include "mosaic/io/report.hpp"

#include <cstdio>
#include <json.hpp>
#include <sstream>

namespace mosaic::io {

namespace {

using json = nlohmann::ordered_json;

json query_json(const geo::SceneQuery& q) {
    return {{"lat", q.center.lat},           {"lon", q.center.lon},   {"half_length_m", q.half_length_m},
            {"half_width_m", q.half_width_m}, {"t_start_s", q.t_start_s}, {"t_end_s", q.t_end_s}};
}

json metrics_json(const ml::Metrics& m) {
    return {{"tp", m.tp},
            {"fp", m.fp},
            {"fn", m.fn},
            {"tn", m.tn},
            {"precision", m.precision},
            {"recall", m.recall},
            {"f1", m.f1}};
}

const char* status_name(pipeline::ComposeStatus s) {
    switch (s) {
        case pipeline::ComposeStatus::Composed: return "composed";
        case pipeline::ComposeStatus::EmptyRegion: return "empty_region";
        case pipeline::ComposeStatus::NoCandidates: return "no_candidates";
    }
    return "unknown";
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }


json manifest_body(const composition::MosaicManifest& m) {
    json tiles = json::array();
    for (const auto& t : m.tiles) {
        tiles.push_back({{"service_id", t.service_id},
                         {"canvas_x", t.canvas_x},
                         {"canvas_y", t.canvas_y},
                         {"tile_w", t.tile_w},
                         {"tile_h", t.tile_h},
                         {"z_order", t.z_order}});
    }
    return {{"schema", kManifestSchema},
            {"query", query_json(m.query)},
            {"provenance",
             {{"model", m.provenance.model},
              {"heuristics", m.provenance.heuristics},
              {"overlap_threshold", m.provenance.overlap_threshold}}},
            {"tiles", tiles}};
}

}  // namespace

std::string manifest_json(const composition::MosaicManifest& m) { return dump(manifest_body(m)); }

std::string manifest_set_json(const std::vector<composition::MosaicManifest>& ms) {
    json all = json::array();
    for (const auto& m : ms) all.push_back(manifest_body(m));
    return dump({{"schema", kManifestSetSchema}, {"manifests", all}});
}

std::string run_report_json(const pipeline::ComposeResult& r, const RunInfo& info) {
    const auto& c = r.counts;
    json composites = json::array();
    for (const auto& comp : r.composites) {
        composites.push_back({{"members", comp.members}, {"mean_score", comp.mean_score}});
    }
    return dump({{"schema", kRunReportSchema},
                 {"status", status_name(r.status)},
                 {"model", info.model},
                 {"heuristics", info.options.heuristics},
                 {"overlap_threshold", info.options.overlap_threshold},
                 {"query", query_json(info.query)},
                 {"stages",
                  {{"services_indexed", c.services_indexed},
                   {"services_in_region", c.services_in_region},
                   {"services_after_heuristics", c.services_after_heuristics},
                   {"pairs_scored", c.pairs_scored},
                   {"pairs_relevant", c.pairs_relevant},
                   {"pairs_after_dedupe", c.pairs_after_dedupe},
                   {"pairs_composable", c.pairs_composable},
                   {"composites", c.composites},
                   {"selected_members", c.selected_members}}},
                 {"redundant", r.redundant},
                 {"composites", composites},
                 {"warnings", info.warnings}});
}

std::string metrics_json(const pipeline::EvalTable& t, std::uint64_t seed) {
    json cells = json::array();
    for (const auto& c : t.cells) {
        json cell = {{"model", c.model},
                     {"heuristics", c.heuristics},
                     {"error", c.error ? json(*c.error) : json(nullptr)},
                     {"train_rows", c.train_rows},
                     {"validation_rows", c.validation_rows},
                     {"test_rows", c.test_rows},
                     {"test_queries", c.test_queries},
                     {"pairs", metrics_json(c.pairs)},
                     {"composition", {{"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}}},
                     {"scene", c.scene ? metrics_json(*c.scene) : json(nullptr)}};
        cells.push_back(std::move(cell));
    }
    return dump({{"schema", kMetricsSchema},
                 {"seed", seed},
                 {"queries", t.queries},
                 {"services", t.services},
                 {"labeled_pairs", t.labeled_pairs},
                 {"folds", t.folds},
                 {"split", {{"train", t.train_queries}, {"validation", t.validation_queries}, {"test", t.test_queries}}},
                 {"cells", cells}});
}

std::string metrics_text(const pipeline::EvalTable& t) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-14s %-5s %7s %7s %7s %7s %7s %7s %7s\n", "model", "heur", "pairF1", "P", "R",
                  "F1", "sceneP", "sceneR", "sceneF1");
    out << line;
    for (const auto& c : t.cells) {
        if (c.error) {
            std::snprintf(line, sizeof line, "%-14s %-5s error: ", c.model.c_str(), c.heuristics ? "on" : "off");
            out << line << *c.error << '\n';
            continue;
        }
        std::snprintf(line, sizeof line, "%-14s %-5s %7.3f %7.3f %7.3f %7.3f", c.model.c_str(),
                      c.heuristics ? "on" : "off", c.pairs.f1, c.precision, c.recall, c.f1);
        out << line;
        if (c.scene) {
            std::snprintf(line, sizeof line, " %7.3f %7.3f %7.3f", c.scene->precision, c.scene->recall, c.scene->f1);
            out << line;
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace mosaic::io
