// Schema-versioned JSON documents for manifests, run reports and metrics
// tables, plus a plain-text rendering of the metrics table.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mosaic/composition.hpp"
#include "mosaic/pipeline.hpp"

namespace mosaic::io {

inline constexpr const char* kManifestSchema = "mosaic.manifest/1";
inline constexpr const char* kManifestSetSchema = "mosaic.manifest-set/1";
inline constexpr const char* kRunReportSchema = "mosaic.run-report/1";
inline constexpr const char* kMetricsSchema = "mosaic.metrics/1";

/// Pretty-printed with two-space indent and a trailing newline. Equal inputs
/// give equal bytes.
std::string manifest_json(const composition::MosaicManifest& m);
/// Several manifests in selection order under one document.
std::string manifest_set_json(const std::vector<composition::MosaicManifest>& ms);

struct RunInfo {
    std::string model;
    geo::SceneQuery query;
    pipeline::PipelineOptions options;
    std::vector<std::string> warnings;
};

std::string run_report_json(const pipeline::ComposeResult& r, const RunInfo& info);

std::string metrics_json(const pipeline::EvalTable& t, std::uint64_t seed);

/// One row per cell, fixed-width columns.
std::string metrics_text(const pipeline::EvalTable& t);

}  // namespace mosaic::io
