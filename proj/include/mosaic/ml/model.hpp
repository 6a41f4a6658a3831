// Trained composability classifiers behind one prediction interface, with a
// versioned text serialization.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "mosaic/ml/dataset.hpp"
#include "mosaic/ml/features.hpp"
#include "mosaic/ml/mlp.hpp"
#include "mosaic/ml/svm.hpp"
#include "mosaic/ml/tree.hpp"

namespace mosaic::ml {

enum class ModelKind { Tree, SvmQuadratic, SvmCubic, SvmRbf, Mlp };

/// "tree", "svm-quadratic", "svm-cubic", "svm-rbf", "mlp".
std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);  // InvalidArgument on unknown names
std::span<const ModelKind> all_model_kinds();

struct Prediction {
    bool composable = false;
    double score = 0.0;  // [0, 1], composable when > 0.5
};

class Classifier {
public:
    virtual ~Classifier() = default;
    virtual Prediction predict(const PairFeatureRow& row) const = 0;
    virtual std::string name() const = 0;
};

using ModelParameters = std::variant<DecisionTree, SvmModel, MlpModel>;

class TrainedModel final : public Classifier {
public:
    TrainedModel(ModelKind kind, Normalizer normalizer, ModelParameters params);

    ModelKind kind() const { return kind_; }
    const Normalizer& normalizer() const { return normalizer_; }
    const ModelParameters& parameters() const { return params_; }

    /// Raw (unnormalized) features in feature_names() order.
    Prediction predict(const FeatureVector& raw) const;
    /// Throws ShapeMismatch unless raw.size() == kFeatureCount.
    Prediction predict(std::span<const double> raw) const;
    Prediction predict(const PairFeatureRow& row) const override { return predict(row.values); }
    std::string name() const override { return std::string(to_string(kind_)); }

private:
    ModelKind kind_;
    Normalizer normalizer_;
    ModelParameters params_;
};

struct TrainOptions {
    TreeConfig tree;
    SvmConfig svm;
    MlpConfig mlp;
    bool normalize = true;
};

/// Fits the normalizer on `train` only, then the model on normalized rows.
/// `validation` is only used by the MLP for early stopping.
TrainedModel train_model(ModelKind kind, const Dataset& train, const Dataset& validation,
                         const TrainOptions& opts = {});

TrainedModel train_tree(const Dataset& train, const TreeConfig& cfg = {});
TrainedModel train_svm(const Dataset& train, const SvmConfig& cfg = {});
TrainedModel train_mlp_model(const Dataset& train, const Dataset& validation, const MlpConfig& cfg = {});

/// Line-based text format; every double is written in shortest round-trip
/// form so deserialize(serialize(m)) reproduces m exactly.
std::string serialize(const TrainedModel& model);
TrainedModel deserialize(std::string_view text);

void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace mosaic::ml
