#include "mosaic/ml/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mosaic/diagnostics.hpp"
#include "mosaic/error.hpp"

namespace mosaic::ml {

std::size_t DecisionTree::split_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return !n.is_leaf(); }));
}

std::size_t DecisionTree::leaf_for(const FeatureVector& x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
        const auto& n = nodes[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return i;
}

namespace {

double gini(double pos, double total) {
    if (total <= 0.0) return 0.0;
    const double p = pos / total;
    return 2.0 * p * (1.0 - p);
}

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
    double imbalance = 0.0;
};

struct Leaf {
    std::size_t node;
    std::vector<std::size_t> rows;
    Split best;      // impurity-reducing split, feature -1 if none
    Split fallback;  // most balanced split of a mixed leaf, feature -1 if none
};

class Grower {
public:
    Grower(const Dataset& data, const TreeConfig& cfg) : data_(data), cfg_(cfg) {}

    double weight_of(std::size_t r) const { return data_.y[r] == 1 ? cfg_.positive_weight : 1.0; }

    void evaluate(Leaf& leaf) const {
        double w_total = 0.0, w_pos = 0.0;
        for (auto r : leaf.rows) {
            w_total += weight_of(r);
            if (data_.y[r] == 1) w_pos += weight_of(r);
        }
        const double parent = w_total * gini(w_pos, w_total);
        const double min_gain = 1e-12 * std::max(1.0, w_total);
        const bool mixed = w_pos > 0.0 && w_pos < w_total;

        std::vector<std::size_t> order = leaf.rows;
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                const double va = data_.x[a][f], vb = data_.x[b][f];
                return va != vb ? va < vb : a < b;
            });
            double l_total = 0.0, l_pos = 0.0;
            for (std::size_t k = 0; k + 1 < order.size(); ++k) {
                const auto r = order[k];
                l_total += weight_of(r);
                if (data_.y[r] == 1) l_pos += weight_of(r);
                const double v = data_.x[r][f];
                const double next = data_.x[order[k + 1]][f];
                if (!(v < next)) continue;
                const double r_total = w_total - l_total, r_pos = w_pos - l_pos;
                const double child = l_total * gini(l_pos, l_total) + r_total * gini(r_pos, r_total);
                const double gain = parent - child;
                const double threshold = v + 0.5 * (next - v);
                const double imbalance = std::abs(l_total - r_total);
                if (gain > min_gain && gain > leaf.best.gain) {
                    leaf.best = {static_cast<int>(f), threshold, gain, imbalance};
                }
                if (mixed && (leaf.fallback.feature < 0 || imbalance < leaf.fallback.imbalance)) {
                    leaf.fallback = {static_cast<int>(f), threshold, gain, imbalance};
                }
            }
        }
    }

    TreeNode make_node(const std::vector<std::size_t>& rows) const {
        TreeNode n;
        double w_pos = 0.0;
        for (auto r : rows) {
            n.weight += weight_of(r);
            if (data_.y[r] == 1) w_pos += weight_of(r);
        }
        n.positive_fraction = n.weight > 0.0 ? w_pos / n.weight : 0.0;
        return n;
    }

    const Dataset& data_;
    const TreeConfig& cfg_;
};

}  // namespace

DecisionTree fit_tree(const Dataset& data, const TreeConfig& cfg) {
    if (data.empty()) fail(ErrorCode::InsufficientData, "tree training needs rows");
    if (!(cfg.positive_weight > 0.0)) fail(ErrorCode::InvalidArgument, "positive weight must be positive");

    Grower g(data, cfg);
    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), std::size_t{0});

    DecisionTree tree;
    tree.nodes.push_back(g.make_node(all));
    const double root_fraction = tree.nodes[0].positive_fraction;
    if (root_fraction == 0.0 || root_fraction == 1.0) {
        warn("decision tree: training data has a single class; using a constant classifier");
        return tree;
    }

    std::vector<Leaf> frontier;
    frontier.push_back({0, std::move(all), {}, {}});
    g.evaluate(frontier.back());

    while (tree.split_count() < cfg.max_splits && !frontier.empty()) {
        // Best improving split across the frontier; ties go to the older leaf.
        std::size_t pick = frontier.size();
        for (std::size_t i = 0; i < frontier.size(); ++i) {
            if (frontier[i].best.feature < 0) continue;
            if (pick == frontier.size() || frontier[i].best.gain > frontier[pick].best.gain) pick = i;
        }
        bool use_fallback = false;
        if (pick == frontier.size()) {
            for (std::size_t i = 0; i < frontier.size(); ++i) {
                if (frontier[i].fallback.feature < 0) continue;
                if (pick == frontier.size() ||
                    frontier[i].fallback.imbalance < frontier[pick].fallback.imbalance) {
                    pick = i;
                }
            }
            if (pick == frontier.size()) break;
            use_fallback = true;
        }

        Leaf leaf = std::move(frontier[pick]);
        frontier.erase(frontier.begin() + static_cast<std::ptrdiff_t>(pick));
        const Split s = use_fallback ? leaf.fallback : leaf.best;

        std::vector<std::size_t> left, right;
        for (auto r : leaf.rows) {
            (data.x[r][static_cast<std::size_t>(s.feature)] <= s.threshold ? left : right).push_back(r);
        }
        const int li = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(g.make_node(left));
        tree.nodes.push_back(g.make_node(right));
        auto& parent = tree.nodes[leaf.node];
        parent.feature = s.feature;
        parent.threshold = s.threshold;
        parent.left = li;
        parent.right = li + 1;

        auto push_leaf = [&](int idx, std::vector<std::size_t> rows) {
            Leaf child{static_cast<std::size_t>(idx), std::move(rows), {}, {}};
            g.evaluate(child);
            frontier.push_back(std::move(child));
        };
        push_leaf(li, std::move(left));
        push_leaf(li + 1, std::move(right));
    }
    return tree;
}

}  // namespace mosaic::ml
