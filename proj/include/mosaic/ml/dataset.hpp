// Labeled rows, reproducible splits and train-only normalization.
#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "mosaic/ml/features.hpp"

namespace mosaic::ml {

/// Feature matrix plus 0/1 labels (1 = composable).
struct Dataset {
    std::vector<FeatureVector> x;
    std::vector<int> y;

    std::size_t size() const { return x.size(); }
    bool empty() const { return x.empty(); }
    void add(const FeatureVector& row, int label) {
        x.push_back(row);
        y.push_back(label);
    }
    std::size_t positives() const;
};

Dataset subset(const Dataset& all, std::span<const std::size_t> rows);

struct DatasetSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
};

/// Seeded shuffle, then 15% validation and 15% test (both rounded down),
/// remainder to train. Throws InsufficientData below 10 rows.
DatasetSplit split_dataset(std::size_t row_count, std::uint64_t seed);

/// Small deterministic RNG helpers on top of std::mt19937_64, whose output
/// sequence is fixed by the standard (unlike the std distributions).
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    std::uint64_t next();
    double uniform();                   // [0, 1)
    double uniform(double lo, double hi);
    std::size_t below(std::size_t n);   // [0, n), unbiased
    double normal();                    // Box-Muller

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

/// Per-feature z-score statistics. Constant features get stddev 1.
struct Normalizer {
    FeatureVector mean{};
    FeatureVector stddev{};

    static Normalizer identity();
    static Normalizer fit(const Dataset& train);
    FeatureVector apply(const FeatureVector& row) const;
    Dataset apply(const Dataset& d) const;
};

}  // namespace mosaic::ml
