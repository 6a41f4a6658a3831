// CART decision tree: Gini impurity, best-first growth, capped split count.
#pragma once

#include <cstddef>
#include <vector>

#include "mosaic/ml/dataset.hpp"

namespace mosaic::ml {

struct TreeNode {
    int feature = -1;  // -1 for leaves
    double threshold = 0.0;  // x[feature] <= threshold goes left
    int left = -1;
    int right = -1;
    double positive_fraction = 0.0;  // class-weighted
    double weight = 0.0;             // class-weighted sample mass

    bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    std::size_t split_count() const;
    std::size_t leaf_for(const FeatureVector& x) const;
    double score(const FeatureVector& x) const { return nodes[leaf_for(x)].positive_fraction; }
};

struct TreeConfig {
    std::size_t max_splits = 20;
    double positive_weight = 1.0;
};

/// Grows the tree by always expanding the leaf whose best split removes the
/// most weighted Gini impurity, until `max_splits` internal nodes exist or
/// no leaf can be improved. A leaf with no impurity-reducing split but mixed
/// labels (e.g. XOR) may take the most balanced zero-gain split, only once
/// every leaf is out of improving splits.
///
/// Single-class data yields a one-leaf constant tree and a warning.
DecisionTree fit_tree(const Dataset& data, const TreeConfig& cfg = {});

}  // namespace mosaic::ml
