// Precision / recall / F1 with fixed zero-denominator conventions.
#pragma once

#include <cstddef>
#include <span>
#include <set>
#include <string>
#include <vector>

#include "mosaic/ml/dataset.hpp"
#include "mosaic/ml/model.hpp"

namespace mosaic::ml {

struct Metrics {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;
    double precision = 0.0;  // 0 when nothing is predicted positive
    double recall = 0.0;     // 0 when there are no positive labels
    double f1 = 0.0;         // 0 when precision or recall is 0
};

Metrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn = 0);

/// Throws EmptyEvaluation for zero rows and ShapeMismatch for length mismatch.
Metrics evaluate_predictions(std::span<const int> predicted, std::span<const int> labels);
Metrics evaluate(const TrainedModel& model, const Dataset& rows);

/// Set retrieval metrics: `selected` against `relevant`.
Metrics evaluate_sets(const std::set<std::string>& selected, const std::set<std::string>& relevant);

/// Set retrieval against groups of interchangeable services. A group counts
/// once when any member is selected; further selected members of the same
/// group and members of no group are false positives.
Metrics evaluate_groups(const std::set<std::string>& selected, const std::vector<std::vector<std::string>>& groups);

}  // namespace mosaic::ml
