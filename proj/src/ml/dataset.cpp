#include "mosaic/ml/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "mosaic/error.hpp"

namespace mosaic::ml {

std::size_t Dataset::positives() const {
    return static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
}

Dataset subset(const Dataset& all, std::span<const std::size_t> rows) {
    Dataset out;
    out.x.reserve(rows.size());
    out.y.reserve(rows.size());
    for (auto r : rows) out.add(all.x.at(r), all.y.at(r));
    return out;
}

DatasetSplit split_dataset(std::size_t row_count, std::uint64_t seed) {
    if (row_count < 10) {
        fail(ErrorCode::InsufficientData,
             "splitting needs at least 10 rows, got " + std::to_string(row_count));
    }
    std::vector<std::size_t> order(row_count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);

    const std::size_t n_val = row_count * 15 / 100;
    const std::size_t n_test = row_count * 15 / 100;
    const std::size_t n_train = row_count - n_val - n_test;

    DatasetSplit split;
    split.train.assign(order.begin(), order.begin() + n_train);
    split.validation.assign(order.begin() + n_train, order.begin() + n_train + n_val);
    split.test.assign(order.begin() + n_train + n_val, order.end());
    return split;
}

// -----------------------------------------------------------------------------

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Rng::next() { return engine_(); }

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::size_t Rng::below(std::size_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
        v = next();
    } while (v >= limit);
    return static_cast<std::size_t>(v % n);
}

double Rng::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// -----------------------------------------------------------------------------

Normalizer Normalizer::identity() {
    Normalizer n;
    n.stddev.fill(1.0);
    return n;
}

Normalizer Normalizer::fit(const Dataset& train) {
    if (train.empty()) fail(ErrorCode::InsufficientData, "normalization needs training rows");
    Normalizer n;
    const double count = static_cast<double>(train.size());
    for (const auto& row : train.x) {
        for (std::size_t f = 0; f < kFeatureCount; ++f) n.mean[f] += row[f];
    }
    for (auto& m : n.mean) m /= count;
    FeatureVector var{};
    for (const auto& row : train.x) {
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            const double d = row[f] - n.mean[f];
            var[f] += d * d;
        }
    }
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        const double sd = std::sqrt(var[f] / count);
        n.stddev[f] = (sd > 1e-12 && std::isfinite(sd)) ? sd : 1.0;
    }
    return n;
}

FeatureVector Normalizer::apply(const FeatureVector& row) const {
    FeatureVector out;
    for (std::size_t f = 0; f < kFeatureCount; ++f) out[f] = (row[f] - mean[f]) / stddev[f];
    return out;
}

Dataset Normalizer::apply(const Dataset& d) const {
    Dataset out;
    out.y = d.y;
    out.x.reserve(d.size());
    for (const auto& row : d.x) out.x.push_back(apply(row));
    return out;
}

}  // namespace mosaic::ml
