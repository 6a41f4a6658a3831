#include "mosaic/ml/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mosaic/error.hpp"

namespace mosaic::ml {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

std::array<double, 2> softmax(double z0, double z1) {
    const double m = std::max(z0, z1);
    const double e0 = std::exp(z0 - m), e1 = std::exp(z1 - m);
    const double s = e0 + e1;
    return {e0 / s, e1 / s};
}

// Activations of every layer for one input; acts[0] is the input itself and
// acts.back() holds the two output logits.
void forward_all(const MlpModel& m, const FeatureVector& x, std::vector<std::vector<double>>& acts) {
    acts.resize(m.layers.size() + 1);
    acts[0].assign(x.begin(), x.end());
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        const auto& layer = m.layers[l];
        auto& out = acts[l + 1];
        out.assign(layer.outputs, 0.0);
        const bool hidden = l + 1 < m.layers.size();
        for (std::size_t o = 0; o < layer.outputs; ++o) {
            double z = layer.biases[o];
            const double* w = &layer.weights[o * layer.inputs];
            for (std::size_t i = 0; i < layer.inputs; ++i) z += w[i] * acts[l][i];
            out[o] = hidden ? sigmoid(z) : z;
        }
    }
}

double sample_weight(int label, double positive_weight) { return label == 1 ? positive_weight : 1.0; }

struct EpochEval {
    double loss = 0.0;
    double f1 = 0.0;
};

EpochEval evaluate_epoch(const MlpModel& m, const Dataset& d, double positive_weight) {
    std::vector<std::size_t> all(d.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    EpochEval e;
    e.loss = mlp_loss(m, d, all, nullptr, positive_weight);
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t r = 0; r < d.size(); ++r) {
        const bool pred = m.forward(d.x[r])[1] > 0.5;
        const bool truth = d.y[r] == 1;
        tp += pred && truth;
        fp += pred && !truth;
        fn += !pred && truth;
    }
    const double precision = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
    e.f1 = precision > 0.0 && recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    return e;
}

void check_finite(const MlpModel& m, double loss, std::size_t epoch) {
    bool finite = std::isfinite(loss);
    for (std::size_t k = 0; finite && k < m.parameter_count(); ++k) finite = std::isfinite(m.parameter(k));
    if (!finite) {
        fail(ErrorCode::TrainingDiverged, "MLP loss became non-finite at epoch " + std::to_string(epoch) +
                                              "; try a smaller learning rate");
    }
}

}  // namespace

std::array<double, 2> MlpModel::forward(const FeatureVector& x) const {
    std::vector<std::vector<double>> acts;
    forward_all(*this, x, acts);
    return softmax(acts.back()[0], acts.back()[1]);
}

std::size_t MlpModel::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.biases.size();
    return n;
}

double& MlpModel::parameter(std::size_t k) {
    for (auto& l : layers) {
        if (k < l.weights.size()) return l.weights[k];
        k -= l.weights.size();
        if (k < l.biases.size()) return l.biases[k];
        k -= l.biases.size();
    }
    fail(ErrorCode::InvalidArgument, "parameter index out of range");
}

double MlpModel::parameter(std::size_t k) const { return const_cast<MlpModel&>(*this).parameter(k); }

MlpModel init_mlp(const MlpConfig& cfg) {
    if (cfg.hidden_layers == 0 || cfg.neurons == 0) {
        fail(ErrorCode::InvalidArgument, "MLP needs at least one hidden layer with one neuron");
    }
    Rng rng(cfg.seed);
    MlpModel m;
    std::size_t in = kFeatureCount;
    for (std::size_t l = 0; l <= cfg.hidden_layers; ++l) {
        const std::size_t out = l < cfg.hidden_layers ? cfg.neurons : 2;
        DenseLayer layer{in, out, std::vector<double>(in * out), std::vector<double>(out, 0.0)};
        const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
        for (auto& w : layer.weights) w = rng.uniform(-bound, bound);
        m.layers.push_back(std::move(layer));
        in = out;
    }
    return m;
}

double mlp_loss(const MlpModel& model, const Dataset& data, std::span<const std::size_t> rows,
                std::vector<double>* grad, double positive_weight) {
    if (rows.empty()) return 0.0;
    if (grad) grad->assign(model.parameter_count(), 0.0);

    // Offsets of each layer's weights and biases in the flat gradient.
    std::vector<std::size_t> w_off, b_off;
    std::size_t off = 0;
    for (const auto& l : model.layers) {
        w_off.push_back(off);
        off += l.weights.size();
        b_off.push_back(off);
        off += l.biases.size();
    }

    std::vector<std::vector<double>> acts;
    std::vector<double> delta, prev_delta;
    double total_w = 0.0, loss = 0.0;
    for (auto r : rows) {
        const int label = data.y[r];
        const double sw = sample_weight(label, positive_weight);
        forward_all(model, data.x[r], acts);
        const auto p = softmax(acts.back()[0], acts.back()[1]);
        loss += -sw * std::log(std::max(p[static_cast<std::size_t>(label)], 1e-300));
        total_w += sw;
        if (!grad) continue;

        delta = {sw * (p[0] - (label == 0 ? 1.0 : 0.0)), sw * (p[1] - (label == 1 ? 1.0 : 0.0))};
        for (std::size_t l = model.layers.size(); l-- > 0;) {
            const auto& layer = model.layers[l];
            const auto& input = acts[l];
            for (std::size_t o = 0; o < layer.outputs; ++o) {
                double* g = &(*grad)[w_off[l] + o * layer.inputs];
                for (std::size_t i = 0; i < layer.inputs; ++i) g[i] += delta[o] * input[i];
                (*grad)[b_off[l] + o] += delta[o];
            }
            if (l == 0) break;
            prev_delta.assign(layer.inputs, 0.0);
            for (std::size_t o = 0; o < layer.outputs; ++o) {
                const double* w = &layer.weights[o * layer.inputs];
                for (std::size_t i = 0; i < layer.inputs; ++i) prev_delta[i] += w[i] * delta[o];
            }
            for (std::size_t i = 0; i < layer.inputs; ++i) prev_delta[i] *= input[i] * (1.0 - input[i]);
            delta.swap(prev_delta);
        }
    }
    if (grad) {
        for (auto& g : *grad) g /= total_w;
    }
    return loss / total_w;
}

void run_mlp_epochs(MlpModel& model, const Dataset& train, const MlpConfig& cfg, std::size_t epochs,
                    std::vector<double>* losses) {
    if (!(cfg.learning_rate > 0.0) || cfg.batch_size == 0) {
        fail(ErrorCode::InvalidArgument, "MLP needs a positive learning rate and batch size");
    }
    Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> grad;
    for (std::size_t e = 0; e < epochs; ++e) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            mlp_loss(model, train, std::span(order).subspan(start, end - start), &grad, cfg.positive_weight);
            for (std::size_t k = 0; k < grad.size(); ++k) model.parameter(k) -= cfg.learning_rate * grad[k];
        }
        std::vector<std::size_t> all(train.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        const double loss = mlp_loss(model, train, all, nullptr, cfg.positive_weight);
        check_finite(model, loss, e + 1);
        if (losses) losses->push_back(loss);
    }
}

MlpModel train_mlp(const Dataset& train, const Dataset& validation, const MlpConfig& cfg,
                   MlpTrainingReport* report) {
    if (train.empty()) fail(ErrorCode::InsufficientData, "MLP training needs rows");
    if (!(cfg.learning_rate > 0.0) || cfg.batch_size == 0) {
        fail(ErrorCode::InvalidArgument, "MLP needs a positive learning rate and batch size");
    }
    MlpModel model = init_mlp(cfg);
    MlpModel best = model;
    MlpTrainingReport rep;
    EpochEval best_eval{std::numeric_limits<double>::infinity(), -1.0};

    Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> grad;
    std::size_t since_best = 0;

    for (std::size_t e = 1; e <= cfg.max_epochs; ++e) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            mlp_loss(model, train, std::span(order).subspan(start, end - start), &grad, cfg.positive_weight);
            for (std::size_t k = 0; k < grad.size(); ++k) model.parameter(k) -= cfg.learning_rate * grad[k];
        }
        const EpochEval tr = evaluate_epoch(model, train, cfg.positive_weight);
        check_finite(model, tr.loss, e);
        rep.train_loss.push_back(tr.loss);
        rep.epochs_run = e;

        if (validation.empty()) {
            best = model;
            rep.best_epoch = e;
            continue;
        }
        const EpochEval va = evaluate_epoch(model, validation, cfg.positive_weight);
        if (va.f1 > best_eval.f1 || (va.f1 == best_eval.f1 && va.loss < best_eval.loss)) {
            best_eval = va;
            best = model;
            rep.best_epoch = e;
            rep.best_validation_f1 = va.f1;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    if (report) *report = std::move(rep);
    return best;
}

}  // namespace mosaic::ml
