// End-to-end scene composition and the heuristics on/off evaluation harness.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mosaic/composition.hpp"
#include "mosaic/heuristics.hpp"
#include "mosaic/index.hpp"
#include "mosaic/io/metadata.hpp"
#include "mosaic/ml/features.hpp"
#include "mosaic/ml/metrics.hpp"
#include "mosaic/ml/model.hpp"

namespace mosaic::pipeline {

/// Answers from the ground-truth labels; unlabeled pairs are non-composable.
class OracleClassifier final : public ml::Classifier {
public:
    explicit OracleClassifier(const io::GroundTruthLabels& labels) : labels_(&labels) {}
    ml::Prediction predict(const ml::PairFeatureRow& row) const override;
    std::string name() const override { return "oracle"; }

private:
    const io::GroundTruthLabels* labels_;
};

/// Says composable with probability `rate`, from a hash of the pair ids and
/// the seed, so repeated calls agree.
class RandomClassifier final : public ml::Classifier {
public:
    RandomClassifier(double rate, std::uint64_t seed);
    ml::Prediction predict(const ml::PairFeatureRow& row) const override;
    std::string name() const override { return "random"; }

private:
    double rate_;
    std::uint64_t seed_;
};

struct PipelineOptions {
    bool heuristics = true;
    double overlap_threshold = 0.5;
    std::optional<std::size_t> top_k;
    bool all_components = false;
};

/// Survivors after each stage; every count is <= the one before it within
/// the service and pair groups.
struct StageCounts {
    std::size_t services_indexed = 0;
    std::size_t services_in_region = 0;
    std::size_t services_after_heuristics = 0;
    std::size_t pairs_scored = 0;
    std::size_t pairs_relevant = 0;
    std::size_t pairs_after_dedupe = 0;
    std::size_t pairs_composable = 0;
    std::size_t composites = 0;
    std::size_t selected_members = 0;
};

/// Services and feature rows handed to the classifier for one query.
struct Candidates {
    std::vector<geo::SocSenService> in_region;
    std::vector<geo::SocSenService> services;  // after heuristics (or all in region)
    std::vector<ml::PairFeatureRow> rows;
    std::vector<std::string> redundant;
    StageCounts counts;
};

Candidates gather_candidates(const index::ServiceIndex& index, const geo::SceneQuery& q,
                             const PipelineOptions& opts);

/// NoCandidates: the region had services but the heuristics kept none.
enum class ComposeStatus { Composed, EmptyRegion, NoCandidates };

struct ComposeResult {
    ComposeStatus status = ComposeStatus::EmptyRegion;
    StageCounts counts;
    std::vector<composition::CompositeService> composites;  // selection order
    std::vector<composition::MosaicManifest> manifests;     // first only, unless all_components
    std::vector<std::string> redundant;
};

/// Composites from classifier decisions over a candidate set.
std::vector<composition::CompositeService> compose_candidates(const Candidates& c, const geo::SceneQuery& q,
                                                              const ml::Classifier& classifier,
                                                              std::size_t* composable_pairs = nullptr);

/// index -> region/time filter -> heuristics -> features -> classify ->
/// closure -> layout. An empty region gives status EmptyRegion, no error.
ComposeResult compose(const index::ServiceIndex& index, const geo::SceneQuery& q, const ml::Classifier& classifier,
                      const PipelineOptions& opts = {});

// -----------------------------------------------------------------------------
// Evaluation
// -----------------------------------------------------------------------------

/// Rows from the candidate pairs of the training and validation queries of
/// split_dataset(queries.size(), seed), labeled from `labels`.
struct TrainingRows {
    ml::DatasetSplit split;
    ml::Dataset train;
    ml::Dataset validation;
};
TrainingRows training_rows(const index::ServiceIndex& index, const io::GroundTruthLabels& labels,
                           const std::vector<geo::SceneQuery>& queries, std::uint64_t seed,
                           const PipelineOptions& opts = {});

struct EvalOptions {
    std::vector<std::string> models{"tree", "svm-quadratic", "svm-cubic", "svm-rbf", "mlp"};
    std::vector<bool> heuristics{true, false};
    std::uint64_t seed = 1;
    std::size_t folds = 7;  // query rotation; 1 = a single 70/15/15 split
    PipelineOptions pipeline;
    ml::TrainOptions train;
    std::size_t threads = 0;  // 0 = hardware concurrency
};

struct EvalCell {
    std::string model;
    bool heuristics = true;
    std::optional<std::string> error;
    std::size_t train_rows = 0;       // summed over folds
    std::size_t validation_rows = 0;  // summed over folds
    std::size_t test_rows = 0;
    std::size_t test_queries = 0;  // scored test queries
    ml::Metrics pairs;             // pair level, test queries
    double precision = 0.0;        // composition level against the labeled graph, mean over test queries
    double recall = 0.0;
    double f1 = 0.0;
    std::optional<ml::Metrics> scene;  // against the scene truth, when given; means over test queries
    double seconds = 0.0;
};

struct EvalTable {
    std::size_t queries = 0;
    std::size_t services = 0;
    std::size_t labeled_pairs = 0;
    std::size_t folds = 0;
    std::size_t train_queries = 0;  // summed over folds
    std::size_t validation_queries = 0;
    std::size_t test_queries = 0;
    std::vector<EvalCell> cells;

    const EvalCell* find(const std::string& model, bool heuristics) const;
};

/// Splits of the query indices. folds <= 1 gives split_dataset (70/15/15).
/// Otherwise the shuffled queries are cut into `folds` chunks; fold f tests
/// chunk f, early-stops on chunk f + 1 and trains on the rest, so every
/// query is tested exactly once.
std::vector<ml::DatasetSplit> query_folds(std::size_t n_queries, std::size_t folds, std::uint64_t seed);

/// For every model and heuristics setting and every fold: train on rows from
/// the training queries, early-stop on the validation queries, then compose
/// each test query. Composition metrics are means over all tested queries.
/// The reference set of a query is the selected composite of the
/// ground-truth graph over the same candidate services and pairs. "oracle"
/// and "random" name the stub classifiers.
/// A failing cell records its error and the others continue.
///
/// With `scene_truth` (one entry per query, empty to skip) each cell is also
/// scored against the query's relevant groups that have a member in the
/// region, with evaluate_groups.
using RelevantGroups = std::vector<std::vector<std::string>>;
EvalTable evaluate_suite(const std::vector<geo::SocSenService>& services, const io::GroundTruthLabels& labels,
                         const std::vector<geo::SceneQuery>& queries, const EvalOptions& opts = {},
                         const std::vector<RelevantGroups>& scene_truth = {});

}  // namespace mosaic::pipeline
