#include "mosaic/ml/model.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mosaic/error.hpp"

namespace mosaic::ml {

namespace {

constexpr std::array<ModelKind, 5> kKinds = {ModelKind::Tree, ModelKind::SvmQuadratic, ModelKind::SvmCubic,
                                             ModelKind::SvmRbf, ModelKind::Mlp};
constexpr std::string_view kMagic = "mosaic-model";
constexpr int kFormatVersion = 1;

KernelKind kernel_for(ModelKind kind) {
    switch (kind) {
        case ModelKind::SvmQuadratic: return KernelKind::Quadratic;
        case ModelKind::SvmCubic: return KernelKind::Cubic;
        case ModelKind::SvmRbf: return KernelKind::Rbf;
        default: fail(ErrorCode::InvalidArgument, "not an SVM model kind");
    }
}

bool params_match(ModelKind kind, const ModelParameters& p) {
    switch (kind) {
        case ModelKind::Tree: return std::holds_alternative<DecisionTree>(p);
        case ModelKind::Mlp: return std::holds_alternative<MlpModel>(p);
        default:
            return std::holds_alternative<SvmModel>(p) && std::get<SvmModel>(p).kernel == kernel_for(kind);
    }
}

double squash(double margin) { return 1.0 / (1.0 + std::exp(-margin)); }

// --- writing -----------------------------------------------------------------

class Writer {
public:
    Writer& word(std::string_view w) {
        sep();
        out_ += w;
        return *this;
    }
    Writer& num(double v) {
        sep();
        char buf[32];
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
        out_.append(buf, end);
        return *this;
    }
    Writer& num(std::int64_t v) {
        sep();
        out_ += std::to_string(v);
        return *this;
    }
    Writer& nums(std::span<const double> vs) {
        for (double v : vs) num(v);
        return *this;
    }
    void endl() {
        out_ += '\n';
        fresh_ = true;
    }
    std::string take() { return std::move(out_); }

private:
    void sep() {
        if (!fresh_) out_ += ' ';
        fresh_ = false;
    }
    std::string out_;
    bool fresh_ = true;
};

// --- reading -----------------------------------------------------------------

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    std::string_view word() {
        skip_space();
        if (pos_ >= text_.size()) bad("unexpected end of model text");
        const auto start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        return text_.substr(start, pos_ - start);
    }
    void expect(std::string_view w) {
        const auto got = word();
        if (got != w) bad("expected '" + std::string(w) + "', found '" + std::string(got) + "'");
    }
    double real() {
        const auto w = word();
        double v = 0.0;
        auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
        if (ec != std::errc{} || p != w.data() + w.size()) bad("bad number '" + std::string(w) + "'");
        return v;
    }
    std::int64_t integer() {
        const auto w = word();
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
        if (ec != std::errc{} || p != w.data() + w.size()) bad("bad integer '" + std::string(w) + "'");
        return v;
    }
    std::size_t count(std::size_t limit = std::size_t{1} << 28) {
        const auto v = integer();
        if (v < 0 || static_cast<std::size_t>(v) > limit) bad("count out of range");
        return static_cast<std::size_t>(v);
    }
    FeatureVector vec() {
        FeatureVector v{};
        for (auto& x : v) x = real();
        return v;
    }
    bool at_end() {
        skip_space();
        return pos_ >= text_.size();
    }
    [[noreturn]] static void bad(const std::string& msg) { fail(ErrorCode::Parse, "model: " + msg); }

private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    std::string_view text_;
    std::size_t pos_ = 0;
};

std::string hex64(std::uint64_t v) {
    char buf[17];
    auto [end, ec] = std::to_chars(buf, buf + 16, v, 16);
    return std::string(16 - static_cast<std::size_t>(end - buf), '0') + std::string(buf, end);
}

}  // namespace

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Tree: return "tree";
        case ModelKind::SvmQuadratic: return "svm-quadratic";
        case ModelKind::SvmCubic: return "svm-cubic";
        case ModelKind::SvmRbf: return "svm-rbf";
        case ModelKind::Mlp: return "mlp";
    }
    return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
    for (auto k : kKinds) {
        if (to_string(k) == name) return k;
    }
    fail(ErrorCode::InvalidArgument, "unknown model kind '" + std::string(name) +
                                         "' (expected tree, svm-quadratic, svm-cubic, svm-rbf or mlp)");
}

std::span<const ModelKind> all_model_kinds() { return kKinds; }

TrainedModel::TrainedModel(ModelKind kind, Normalizer normalizer, ModelParameters params)
    : kind_(kind), normalizer_(normalizer), params_(std::move(params)) {
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        if (!std::isfinite(normalizer_.mean[i]) || !std::isfinite(normalizer_.stddev[i]) ||
            !(normalizer_.stddev[i] > 0.0)) {
            fail(ErrorCode::InvalidArgument, "normalization statistics must be finite with positive stddev");
        }
    }
    if (!params_match(kind_, params_)) {
        fail(ErrorCode::InvalidArgument, "parameters do not match model kind " + name());
    }
    if (const auto* mlp = std::get_if<MlpModel>(&params_)) {
        std::size_t in = kFeatureCount;
        for (const auto& l : mlp->layers) {
            if (l.inputs != in || l.weights.size() != l.inputs * l.outputs || l.biases.size() != l.outputs) {
                fail(ErrorCode::ShapeMismatch, "inconsistent MLP layer shapes");
            }
            in = l.outputs;
        }
        if (mlp->layers.empty() || in != 2) fail(ErrorCode::ShapeMismatch, "MLP must end in 2 outputs");
    }
}

Prediction TrainedModel::predict(const FeatureVector& raw) const {
    const FeatureVector x = normalizer_.apply(raw);
    return std::visit(
        [&](const auto& m) -> Prediction {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, DecisionTree>) {
                const double s = m.score(x);
                return {s > 0.5, s};
            } else if constexpr (std::is_same_v<T, SvmModel>) {
                const double d = m.decision(x);
                return {d > 0.0, squash(d)};
            } else {
                const double s = m.forward(x)[1];
                return {s > 0.5, s};
            }
        },
        params_);
}

Prediction TrainedModel::predict(std::span<const double> raw) const {
    if (raw.size() != kFeatureCount) {
        fail(ErrorCode::ShapeMismatch, "feature row has " + std::to_string(raw.size()) + " values, model expects " +
                                           std::to_string(kFeatureCount));
    }
    FeatureVector v{};
    std::copy(raw.begin(), raw.end(), v.begin());
    return predict(v);
}

TrainedModel train_model(ModelKind kind, const Dataset& train, const Dataset& validation,
                         const TrainOptions& opts) {
    if (train.empty()) fail(ErrorCode::InsufficientData, "training set is empty");
    const Normalizer norm = opts.normalize ? Normalizer::fit(train) : Normalizer::identity();
    const Dataset tn = norm.apply(train);
    switch (kind) {
        case ModelKind::Tree: return TrainedModel(kind, norm, fit_tree(tn, opts.tree));
        case ModelKind::Mlp: {
            const Dataset vn = norm.apply(validation);
            return TrainedModel(kind, norm, train_mlp(tn, vn, opts.mlp));
        }
        default: {
            SvmConfig cfg = opts.svm;
            cfg.kernel = kernel_for(kind);
            return TrainedModel(kind, norm, solve_svm(tn, cfg).model);
        }
    }
}

TrainedModel train_tree(const Dataset& train, const TreeConfig& cfg) {
    TrainOptions o;
    o.tree = cfg;
    return train_model(ModelKind::Tree, train, {}, o);
}

TrainedModel train_svm(const Dataset& train, const SvmConfig& cfg) {
    TrainOptions o;
    o.svm = cfg;
    const ModelKind kind = cfg.kernel == KernelKind::Quadratic ? ModelKind::SvmQuadratic
                           : cfg.kernel == KernelKind::Cubic   ? ModelKind::SvmCubic
                                                               : ModelKind::SvmRbf;
    return train_model(kind, train, {}, o);
}

TrainedModel train_mlp_model(const Dataset& train, const Dataset& validation, const MlpConfig& cfg) {
    TrainOptions o;
    o.mlp = cfg;
    return train_model(ModelKind::Mlp, train, validation, o);
}

// -----------------------------------------------------------------------------

std::string serialize(const TrainedModel& model) {
    Writer w;
    w.word(kMagic).num(std::int64_t{kFormatVersion}).endl();
    w.word("kind").word(to_string(model.kind())).endl();
    w.word("feature_hash").word(hex64(feature_order_hash())).endl();
    w.word("mean").nums(model.normalizer().mean).endl();
    w.word("stddev").nums(model.normalizer().stddev).endl();

    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, DecisionTree>) {
                w.word("tree").num(static_cast<std::int64_t>(m.nodes.size())).endl();
                for (const auto& n : m.nodes) {
                    w.word("node").num(std::int64_t{n.feature}).num(n.threshold).num(std::int64_t{n.left});
                    w.num(std::int64_t{n.right}).num(n.positive_fraction).num(n.weight).endl();
                }
            } else if constexpr (std::is_same_v<T, SvmModel>) {
                w.word("svm").num(m.gamma).num(m.bias).num(static_cast<std::int64_t>(m.coef.size())).endl();
                for (std::size_t i = 0; i < m.coef.size(); ++i) {
                    w.word("sv").num(m.coef[i]).nums(m.support_vectors[i]).endl();
                }
            } else {
                w.word("mlp").num(static_cast<std::int64_t>(m.layers.size())).endl();
                for (const auto& l : m.layers) {
                    w.word("layer").num(static_cast<std::int64_t>(l.inputs));
                    w.num(static_cast<std::int64_t>(l.outputs)).endl();
                    w.word("w").nums(l.weights).endl();
                    w.word("b").nums(l.biases).endl();
                }
            }
        },
        model.parameters());
    w.word("end").endl();
    return w.take();
}

TrainedModel deserialize(std::string_view text) {
    Reader r(text);
    r.expect(kMagic);
    if (r.integer() != kFormatVersion) Reader::bad("unsupported format version");
    r.expect("kind");
    const ModelKind kind = parse_model_kind(r.word());
    r.expect("feature_hash");
    if (r.word() != hex64(feature_order_hash())) {
        fail(ErrorCode::ShapeMismatch, "model was saved with a different feature order");
    }
    Normalizer norm;
    r.expect("mean");
    norm.mean = r.vec();
    r.expect("stddev");
    norm.stddev = r.vec();

    ModelParameters params;
    if (kind == ModelKind::Tree) {
        r.expect("tree");
        DecisionTree t;
        t.nodes.resize(r.count());
        for (auto& n : t.nodes) {
            r.expect("node");
            n.feature = static_cast<int>(r.integer());
            n.threshold = r.real();
            n.left = static_cast<int>(r.integer());
            n.right = static_cast<int>(r.integer());
            n.positive_fraction = r.real();
            n.weight = r.real();
            const auto limit = static_cast<std::int64_t>(t.nodes.size());
            if (n.feature >= static_cast<int>(kFeatureCount) ||
                (n.feature >= 0 && (n.left <= 0 || n.right <= 0 || n.left >= limit || n.right >= limit))) {
                Reader::bad("malformed tree node");
            }
        }
        if (t.nodes.empty()) Reader::bad("empty tree");
        params = std::move(t);
    } else if (kind == ModelKind::Mlp) {
        r.expect("mlp");
        MlpModel m;
        m.layers.resize(r.count(64));
        for (auto& l : m.layers) {
            r.expect("layer");
            l.inputs = r.count(4096);
            l.outputs = r.count(4096);
            r.expect("w");
            l.weights.resize(l.inputs * l.outputs);
            for (auto& v : l.weights) v = r.real();
            r.expect("b");
            l.biases.resize(l.outputs);
            for (auto& v : l.biases) v = r.real();
        }
        params = std::move(m);
    } else {
        r.expect("svm");
        SvmModel m;
        m.kernel = kernel_for(kind);
        m.gamma = r.real();
        m.bias = r.real();
        const std::size_t n = r.count();
        for (std::size_t i = 0; i < n; ++i) {
            r.expect("sv");
            m.coef.push_back(r.real());
            m.support_vectors.push_back(r.vec());
        }
        params = std::move(m);
    }
    r.expect("end");
    if (!r.at_end()) Reader::bad("trailing content after 'end'");
    return TrainedModel(kind, norm, std::move(params));
}

void save_model(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
    out << serialize(model);
    if (!out) fail(ErrorCode::Io, "failed writing '" + path + "'");
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return deserialize(ss.str());
}

}  // namespace mosaic::ml
