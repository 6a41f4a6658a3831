#include <algorithm>
#include "mosaic/ml/metrics.hpp"

#include "mosaic/error.hpp"

namespace mosaic::ml {

Metrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
    Metrics m{tp, fp, fn, tn};
    m.precision = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
    m.recall = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
    if (m.precision > 0.0 && m.recall > 0.0) {
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }
    return m;
}

Metrics evaluate_predictions(std::span<const int> predicted, std::span<const int> labels) {
    if (labels.empty()) fail(ErrorCode::EmptyEvaluation, "cannot evaluate an empty row set");
    if (predicted.size() != labels.size()) {
        fail(ErrorCode::ShapeMismatch, "prediction and label counts differ");
    }
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool p = predicted[i] == 1, t = labels[i] == 1;
        tp += p && t;
        fp += p && !t;
        fn += !p && t;
        tn += !p && !t;
    }
    return metrics_from_counts(tp, fp, fn, tn);
}

Metrics evaluate(const TrainedModel& model, const Dataset& rows) {
    if (rows.empty()) fail(ErrorCode::EmptyEvaluation, "cannot evaluate an empty row set");
    std::vector<int> pred;
    pred.reserve(rows.size());
    for (const auto& x : rows.x) pred.push_back(model.predict(x).composable ? 1 : 0);
    return evaluate_predictions(pred, rows.y);
}

Metrics evaluate_sets(const std::set<std::string>& selected, const std::set<std::string>& relevant) {
    std::size_t tp = 0;
    for (const auto& s : selected) tp += relevant.contains(s);
    return metrics_from_counts(tp, selected.size() - tp, relevant.size() - tp);
}

Metrics evaluate_groups(const std::set<std::string>& selected, const std::vector<std::vector<std::string>>& groups) {
    std::size_t tp = 0;
    for (const auto& g : groups) {
        tp += std::any_of(g.begin(), g.end(), [&](const std::string& id) { return selected.contains(id); });
    }
    return metrics_from_counts(tp, selected.size() - tp, groups.size() - tp);
}

}  // namespace mosaic::ml
