// Feed-forward network: sigmoid hidden layers, 2-way softmax output,
// cross-entropy loss, mini-batch gradient descent.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mosaic/ml/dataset.hpp"

namespace mosaic::ml {

struct DenseLayer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> weights;  // outputs x inputs, row-major
    std::vector<double> biases;   // outputs
};

struct MlpModel {
    std::vector<DenseLayer> layers;  // last layer feeds the softmax

    /// Class probabilities {non-composable, composable}.
    std::array<double, 2> forward(const FeatureVector& x) const;

    std::size_t parameter_count() const;
    /// Flat view over all weights then biases, layer by layer.
    double& parameter(std::size_t k);
    double parameter(std::size_t k) const;
};

struct MlpConfig {
    std::size_t hidden_layers = 2;
    std::size_t neurons = 10;
    double learning_rate = 0.05;
    std::size_t batch_size = 32;
    std::size_t max_epochs = 500;
    std::size_t patience = 25;  // epochs without validation improvement
    double positive_weight = 1.0;
    std::uint64_t seed = 1;
};

/// Xavier-uniform weights, zero biases.
MlpModel init_mlp(const MlpConfig& cfg);

/// Mean (class-weighted) cross-entropy over `rows`. When `grad` is given it
/// receives the gradient in parameter() order.
double mlp_loss(const MlpModel& model, const Dataset& data, std::span<const std::size_t> rows,
                std::vector<double>* grad = nullptr, double positive_weight = 1.0);

struct MlpTrainingReport {
    std::size_t epochs_run = 0;
    std::size_t best_epoch = 0;
    double best_validation_f1 = 0.0;
    std::vector<double> train_loss;  // full training-set loss after each epoch
};

/// Trains from init_mlp(cfg). With a non-empty validation set the weights
/// of the best validation F1 epoch (ties by lower validation loss) are kept
/// and training stops after `patience` epochs without improvement.
/// Throws TrainingDiverged when the loss becomes non-finite.
MlpModel train_mlp(const Dataset& train, const Dataset& validation, const MlpConfig& cfg,
                   MlpTrainingReport* report = nullptr);

/// Continues training `model` in place for a fixed number of epochs, no
/// early stopping. Used for checkpoints in gradient checks.
void run_mlp_epochs(MlpModel& model, const Dataset& train, const MlpConfig& cfg, std::size_t epochs,
                    std::vector<double>* losses = nullptr);

}  // namespace mosaic::ml
