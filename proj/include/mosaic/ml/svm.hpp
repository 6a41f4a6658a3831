// Soft-margin kernel SVM trained by sequential minimal optimization.
#pragma once

#include <cstddef>
#include <vector>

#include "mosaic/ml/dataset.hpp"

namespace mosaic::ml {

enum class KernelKind { Quadratic, Cubic, Rbf };

/// (x·y + 1)^2, (x·y + 1)^3 or exp(-gamma ||x - y||^2).
double kernel_value(KernelKind kind, double gamma, const FeatureVector& a, const FeatureVector& b);

struct SvmConfig {
    KernelKind kernel = KernelKind::Rbf;
    double c = 1.0;
    double gamma = 0.0;             // <= 0 means 1 / feature count
    double tolerance = 1e-3;        // on the maximal KKT violation
    std::size_t max_iterations = 0; // 0 means max(10^7, 100 n)
    double positive_weight = 1.0;   // scales C for the composable class
    std::size_t cache_bytes = std::size_t{256} << 20;
};

struct SvmModel {
    KernelKind kernel = KernelKind::Rbf;
    double gamma = 0.0;
    double bias = 0.0;
    std::vector<FeatureVector> support_vectors;
    std::vector<double> coef;  // alpha_i * y_i

    double decision(const FeatureVector& x) const;
};

/// Full solver output; the multipliers are kept for optimality checks.
struct SvmSolution {
    SvmModel model;
    std::vector<double> alpha;        // one per training row
    std::vector<double> upper_bound;  // C_i per training row
    std::size_t iterations = 0;
    double kkt_gap = 0.0;             // max violating pair gap at exit
};

/// Labels are mapped 1 -> +1, 0 -> -1. Needs both classes, C > 0 and, for
/// the RBF kernel, a positive gamma. Throws ConvergenceFailure when the
/// iteration cap is reached first.
SvmSolution solve_svm(const Dataset& data, const SvmConfig& cfg);

}  // namespace mosaic::ml
