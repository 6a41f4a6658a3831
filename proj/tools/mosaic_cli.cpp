// Command-line front end: ingest, synth, train, evaluate, compose.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mosaic/diagnostics.hpp"
#include "mosaic/error.hpp"
#include "mosaic/io/metadata.hpp"
#include "mosaic/io/report.hpp"
#include "mosaic/ml/model.hpp"
#include "mosaic/pipeline.hpp"
#include "mosaic/synth.hpp"

namespace {

using namespace mosaic;

constexpr int kExitError = 1;
constexpr int kExitEmptyRegion = 3;

struct GlobalFlags {
    std::uint64_t seed = 1;
    bool no_heuristics = false;
    std::string model;
    double overlap_threshold = 0.5;
    bool all_components = false;

    pipeline::PipelineOptions pipeline() const {
        pipeline::PipelineOptions o;
        o.heuristics = !no_heuristics;
        o.overlap_threshold = overlap_threshold;
        o.all_components = all_components;
        return o;
    }
};

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
    out << text;
    if (!out) fail(ErrorCode::Io, "write to '" + path + "' failed");
}

std::vector<geo::SocSenService> load_services(const std::string& path) {
    const auto r = io::ingest_file(path);
    for (const auto& issue : r.rejected) {
        std::cerr << path << ":" << issue.line << ": rejected: " << issue.message << '\n';
    }
    return r.services;
}

int run_ingest(const std::string& input, const std::string& output) {
    const auto r = io::ingest_file(input);
    for (const auto& issue : r.rejected) {
        std::cerr << input << ":" << issue.line << ": rejected: " << issue.message << '\n';
    }
    if (!output.empty()) io::write_services_file(output, r.services);
    std::cout << "lines " << r.total_lines << ", accepted " << r.services.size() << ", rejected "
              << r.rejected.size() << ", blank " << r.blank_lines << '\n';
    return 0;
}

int run_synth(const std::string& dir, std::size_t scenes, const GlobalFlags& g) {
    synth::SynthConfig cfg;
    cfg.scenes = scenes;
    cfg.seed = g.seed;
    cfg.overlap_bound = g.overlap_threshold;
    const auto d = synth::generate_synthetic(cfg);
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);
    io::write_services_file((base / "services.jsonl").string(), d.services);
    io::write_labels_file((base / "labels.jsonl").string(), d.labels);
    io::write_queries_file((base / "queries.txt").string(), d.queries());
    io::write_scene_truth_file((base / "truth.jsonl").string(), d.scene_truth());
    std::cout << "scenes " << d.scenes.size() << ", services " << d.services.size() << ", labeled pairs "
              << d.labels.size() << " (" << d.labels.positives() << " composable)\n";
    return 0;
}

int run_train(const std::string& metadata, const std::string& labels_path, const std::string& queries_path,
              const std::string& out, const GlobalFlags& g) {
    if (g.model.empty()) fail(ErrorCode::InvalidArgument, "train needs --model");
    const auto kind = ml::parse_model_kind(g.model);
    const index::ServiceIndex index(load_services(metadata));
    const auto labels = io::read_labels_file(labels_path);
    const auto queries = io::read_queries_file(queries_path);
    const auto rows = pipeline::training_rows(index, labels, queries, g.seed, g.pipeline());
    ml::TrainOptions opts;
    opts.mlp.seed = g.seed;
    const auto model = ml::train_model(kind, rows.train, rows.validation, opts);
    ml::save_model(model, out);
    std::cout << "trained " << model.name() << " on " << rows.train.size() << " rows (" << rows.train.positives()
              << " composable)";
    if (!rows.validation.empty()) {
        const auto m = ml::evaluate(model, rows.validation);
        std::cout << ", validation F1 " << m.f1;
    }
    std::cout << '\n';
    return 0;
}

int run_evaluate(const std::string& metadata, const std::string& labels_path, const std::string& queries_path,
                 const std::string& truth_path, std::vector<std::string> models, std::size_t threads,
                 const std::string& out, const GlobalFlags& g) {
    const auto services = load_services(metadata);
    const auto labels = io::read_labels_file(labels_path);
    const auto queries = io::read_queries_file(queries_path);
    io::SceneTruth truth;
    if (!truth_path.empty()) truth = io::read_scene_truth_file(truth_path);

    pipeline::EvalOptions opts;
    if (!g.model.empty()) models = {g.model};
    if (!models.empty()) opts.models = models;
    if (g.no_heuristics) opts.heuristics = {false};
    opts.seed = g.seed;
    opts.pipeline = g.pipeline();
    opts.train.mlp.seed = g.seed;
    opts.threads = threads;
    const auto table = pipeline::evaluate_suite(services, labels, queries, opts, truth);
    std::cout << io::metrics_text(table);
    if (!out.empty()) write_text(out, io::metrics_json(table, g.seed));
    return 0;
}

int run_compose(const std::string& metadata, const std::string& query_text, const std::string& model_path,
                const std::string& labels_path, const std::string& manifest_path, const std::string& report_path,
                const GlobalFlags& g) {
    if (model_path.empty() == labels_path.empty()) {
        fail(ErrorCode::InvalidArgument, "compose needs exactly one of --model-file or --oracle-labels");
    }
    const auto q = io::parse_query(query_text);
    const index::ServiceIndex index(load_services(metadata));

    std::optional<ml::TrainedModel> model;
    std::optional<io::GroundTruthLabels> labels;
    std::optional<pipeline::OracleClassifier> oracle;
    const ml::Classifier* classifier = nullptr;
    if (!model_path.empty()) {
        model.emplace(ml::load_model(model_path));
        if (!g.model.empty() && ml::parse_model_kind(g.model) != model->kind()) {
            fail(ErrorCode::InvalidArgument, "--model " + g.model + " does not match the " + model->name() + " model file");
        }
        classifier = &*model;
    } else {
        labels.emplace(io::read_labels_file(labels_path));
        oracle.emplace(*labels);
        classifier = &*oracle;
    }

    ScopedWarningCapture warnings;
    const auto opts = g.pipeline();
    const auto result = pipeline::compose(index, q, *classifier, opts);
    const io::RunInfo info{classifier->name(), q, opts, warnings.messages()};
    if (!report_path.empty()) write_text(report_path, io::run_report_json(result, info));
    for (const auto& w : warnings.messages()) std::cerr << "warning: " << w << '\n';

    if (result.status == pipeline::ComposeStatus::EmptyRegion) {
        std::cerr << "no services in region/time\n";
        return kExitEmptyRegion;
    }
    if (result.status == pipeline::ComposeStatus::NoCandidates) {
        std::cerr << "heuristics kept no candidate pairs\n";
        return kExitEmptyRegion;
    }
    write_text(manifest_path, opts.all_components ? io::manifest_set_json(result.manifests)
                                                  : io::manifest_json(result.manifests.front()));
    const auto& c = result.counts;
    std::cerr << "region " << c.services_in_region << ", after heuristics " << c.services_after_heuristics
              << ", pairs " << c.pairs_after_dedupe << ", composable " << c.pairs_composable << ", composites "
              << c.composites << ", selected " << c.selected_members << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scene mosaics from crowdsourced image metadata"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags g;
    app.add_option("--seed", g.seed, "Seed for splits, training and generation")->capture_default_str();
    app.add_flag("--no-heuristics", g.no_heuristics, "Skip the relevance and duplicate filters");
    app.add_option("--model", g.model, "Classifier kind")
        ->check(CLI::IsMember({"tree", "svm-quadratic", "svm-cubic", "svm-rbf", "mlp"}));
    app.add_option("--overlap-threshold", g.overlap_threshold, "Duplicate coverage threshold")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app.add_flag("--all-components", g.all_components, "Lay out every composite, not only the selected one");

    std::string metadata, labels, queries, output, truth, model_file, query, manifest, report, out_dir;
    std::vector<std::string> models;
    std::size_t scenes = 70;
    std::size_t threads = 0;

    auto* ingest = app.add_subcommand("ingest", "Validate a metadata file");
    ingest->add_option("input", metadata, "Line-delimited JSON metadata")->required()->check(CLI::ExistingFile);
    ingest->add_option("-o,--output", output, "Write accepted records here");

    auto* synth_cmd = app.add_subcommand("synth", "Generate the synthetic city with ground truth");
    synth_cmd->add_option("-o,--out-dir", out_dir, "Output directory")->required();
    synth_cmd->add_option("--scenes", scenes, "Number of scenes (one query each)")->capture_default_str();

    auto* train = app.add_subcommand("train", "Train one classifier on the training queries");
    train->add_option("--metadata", metadata)->required()->check(CLI::ExistingFile);
    train->add_option("--labels", labels)->required()->check(CLI::ExistingFile);
    train->add_option("--queries", queries)->required()->check(CLI::ExistingFile);
    train->add_option("-o,--out", output, "Model file")->required();

    auto* evaluate = app.add_subcommand("evaluate", "Heuristics on/off evaluation of every model kind");
    evaluate->add_option("--metadata", metadata)->required()->check(CLI::ExistingFile);
    evaluate->add_option("--labels", labels)->required()->check(CLI::ExistingFile);
    evaluate->add_option("--queries", queries)->required()->check(CLI::ExistingFile);
    evaluate->add_option("--truth", truth, "Relevant groups per query")->check(CLI::ExistingFile);
    evaluate->add_option("--models", models, "Model kinds, or oracle / random stubs")->delimiter(',');
    evaluate->add_option("--threads", threads, "Worker threads, 0 = all cores");
    evaluate->add_option("-o,--out", output, "Metrics JSON");

    auto* compose = app.add_subcommand("compose", "Compose the scene for one query");
    compose->add_option("--metadata", metadata)->required()->check(CLI::ExistingFile);
    compose->add_option("--query", query, "\"lat lon l_m w_m t_start t_end\"")->required();
    compose->add_option("--model-file", model_file, "Trained model")->check(CLI::ExistingFile);
    compose->add_option("--oracle-labels", labels, "Answer from ground-truth labels instead")
        ->check(CLI::ExistingFile);
    compose->add_option("--manifest", manifest, "Manifest output, default stdout");
    compose->add_option("--report", report, "Run report output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) return run_ingest(metadata, output);
        if (*synth_cmd) return run_synth(out_dir, scenes, g);
        if (*train) return run_train(metadata, labels, queries, output, g);
        if (*evaluate) return run_evaluate(metadata, labels, queries, truth, models, threads, output, g);
        if (*compose) return run_compose(metadata, query, model_file, labels, manifest, report, g);
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
