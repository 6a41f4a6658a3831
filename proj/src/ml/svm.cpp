#include "mosaic/ml/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <sstream>
#include <unordered_map>

#include "mosaic/error.hpp"

namespace mosaic::ml {

double kernel_value(KernelKind kind, double gamma, const FeatureVector& a, const FeatureVector& b) {
    switch (kind) {
        case KernelKind::Quadratic:
        case KernelKind::Cubic: {
            double dot = 0.0;
            for (std::size_t f = 0; f < kFeatureCount; ++f) dot += a[f] * b[f];
            const double base = dot + 1.0;
            return kind == KernelKind::Quadratic ? base * base : base * base * base;
        }
        case KernelKind::Rbf: {
            double sq = 0.0;
            for (std::size_t f = 0; f < kFeatureCount; ++f) {
                const double d = a[f] - b[f];
                sq += d * d;
            }
            return std::exp(-gamma * sq);
        }
    }
    return 0.0;
}

double SvmModel::decision(const FeatureVector& x) const {
    double sum = bias;
    for (std::size_t i = 0; i < support_vectors.size(); ++i) {
        sum += coef[i] * kernel_value(kernel, gamma, support_vectors[i], x);
    }
    return sum;
}

namespace {

constexpr double kTau = 1e-12;

// LRU cache of rows of Q_ij = y_i y_j K(x_i, x_j).
class QMatrix {
public:
    QMatrix(const Dataset& data, const std::vector<double>& y, KernelKind kind, double gamma,
            std::size_t cache_bytes)
        : data_(data), y_(y), kind_(kind), gamma_(gamma) {
        const std::size_t row_bytes = std::max<std::size_t>(1, data.size() * sizeof(double));
        capacity_ = std::max<std::size_t>(2, cache_bytes / row_bytes);
        diag_.resize(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) {
            diag_[i] = kernel_value(kind_, gamma_, data_.x[i], data_.x[i]);
        }
    }

    const std::vector<double>& row(std::size_t i) {
        if (auto it = index_.find(i); it != index_.end()) {
            rows_.splice(rows_.begin(), rows_, it->second);
            return it->second->second;
        }
        if (rows_.size() >= capacity_) {
            index_.erase(rows_.back().first);
            rows_.pop_back();
        }
        std::vector<double> r(data_.size());
        for (std::size_t k = 0; k < data_.size(); ++k) {
            r[k] = y_[i] * y_[k] * kernel_value(kind_, gamma_, data_.x[i], data_.x[k]);
        }
        rows_.emplace_front(i, std::move(r));
        index_[i] = rows_.begin();
        return rows_.front().second;
    }

    double diag(std::size_t i) const { return diag_[i]; }

private:
    const Dataset& data_;
    const std::vector<double>& y_;
    KernelKind kind_;
    double gamma_;
    std::size_t capacity_;
    std::vector<double> diag_;
    std::list<std::pair<std::size_t, std::vector<double>>> rows_;
    std::unordered_map<std::size_t, std::list<std::pair<std::size_t, std::vector<double>>>::iterator> index_;
};

}  // namespace

SvmSolution solve_svm(const Dataset& data, const SvmConfig& cfg) {
    const std::size_t n = data.size();
    if (n < 2) fail(ErrorCode::InsufficientData, "SVM training needs at least 2 rows");
    const std::size_t pos = data.positives();
    if (pos == 0 || pos == n) fail(ErrorCode::InsufficientData, "SVM training needs both classes");
    if (!(cfg.c > 0.0)) fail(ErrorCode::InvalidArgument, "SVM C must be positive");
    if (!(cfg.positive_weight > 0.0)) fail(ErrorCode::InvalidArgument, "positive weight must be positive");
    double gamma = cfg.gamma;
    if (cfg.kernel == KernelKind::Rbf) {
        if (gamma <= 0.0) gamma = 1.0 / static_cast<double>(kFeatureCount);
        if (!std::isfinite(gamma)) fail(ErrorCode::InvalidArgument, "RBF gamma must be finite");
    }
    const std::size_t max_iter =
        cfg.max_iterations > 0 ? cfg.max_iterations : std::max<std::size_t>(10'000'000, 100 * n);

    std::vector<double> y(n), upper(n), alpha(n, 0.0), grad(n, -1.0);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = data.y[i] == 1 ? 1.0 : -1.0;
        upper[i] = data.y[i] == 1 ? cfg.c * cfg.positive_weight : cfg.c;
    }
    QMatrix q(data, y, cfg.kernel, gamma, cfg.cache_bytes);

    auto is_upper = [&](std::size_t t) { return alpha[t] >= upper[t]; };
    auto is_lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

    std::size_t iter = 0;
    double gap = std::numeric_limits<double>::infinity();
    for (;;) {
        // Working set: maximal violator i, then j by second-order gain.
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (y[t] > 0) {
                if (!is_upper(t) && -grad[t] >= gmax) {
                    gmax = -grad[t];
                    i = t;
                }
            } else if (!is_lower(t) && grad[t] >= gmax) {
                gmax = grad[t];
                i = t;
            }
        }
        double gmax2 = -std::numeric_limits<double>::infinity();
        double best_obj = std::numeric_limits<double>::infinity();
        std::size_t j = n;
        const std::vector<double>* qi = (i < n) ? &q.row(i) : nullptr;
        for (std::size_t t = 0; t < n; ++t) {
            if (y[t] > 0) {
                if (is_lower(t)) continue;
                const double diff = gmax + grad[t];
                gmax2 = std::max(gmax2, grad[t]);
                if (diff > 0.0 && qi) {
                    double quad = q.diag(i) + q.diag(t) - 2.0 * y[i] * (*qi)[t];
                    if (quad <= 0.0) quad = kTau;
                    const double obj = -(diff * diff) / quad;
                    if (obj <= best_obj) {
                        best_obj = obj;
                        j = t;
                    }
                }
            } else {
                if (is_upper(t)) continue;
                const double diff = gmax - grad[t];
                gmax2 = std::max(gmax2, -grad[t]);
                if (diff > 0.0 && qi) {
                    double quad = q.diag(i) + q.diag(t) + 2.0 * y[i] * (*qi)[t];
                    if (quad <= 0.0) quad = kTau;
                    const double obj = -(diff * diff) / quad;
                    if (obj <= best_obj) {
                        best_obj = obj;
                        j = t;
                    }
                }
            }
        }
        gap = gmax + gmax2;
        if (gap < cfg.tolerance || i == n || j == n) break;
        if (iter >= max_iter) {
            std::ostringstream os;
            os << "SMO did not converge in " << max_iter << " iterations (KKT gap " << gap
               << ", tolerance " << cfg.tolerance << ")";
            fail(ErrorCode::ConvergenceFailure, os.str());
        }
        ++iter;

        const std::vector<double>& qrow_i = q.row(i);
        const std::vector<double>& qrow_j = q.row(j);
        const double ci = upper[i], cj = upper[j];
        const double old_ai = alpha[i], old_aj = alpha[j];
        double ai = old_ai, aj = old_aj;

        if (y[i] != y[j]) {
            double quad = q.diag(i) + q.diag(j) + 2.0 * qrow_i[j];
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = ai - aj;
            ai += delta;
            aj += delta;
            if (diff > 0.0) {
                if (aj < 0.0) { aj = 0.0; ai = diff; }
            } else {
                if (ai < 0.0) { ai = 0.0; aj = -diff; }
            }
            if (diff > ci - cj) {
                if (ai > ci) { ai = ci; aj = ci - diff; }
            } else {
                if (aj > cj) { aj = cj; ai = cj + diff; }
            }
        } else {
            double quad = q.diag(i) + q.diag(j) - 2.0 * qrow_i[j];
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = ai + aj;
            ai -= delta;
            aj += delta;
            if (sum > ci) {
                if (ai > ci) { ai = ci; aj = sum - ci; }
            } else {
                if (aj < 0.0) { aj = 0.0; ai = sum; }
            }
            if (sum > cj) {
                if (aj > cj) { aj = cj; ai = sum - cj; }
            } else {
                if (ai < 0.0) { ai = 0.0; aj = sum; }
            }
        }
        alpha[i] = ai;
        alpha[j] = aj;
        const double dai = ai - old_ai, daj = aj - old_aj;
        for (std::size_t k = 0; k < n; ++k) grad[k] += qrow_i[k] * dai + qrow_j[k] * daj;
    }

    // Bias from free multipliers, or the midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (is_upper(t)) {
            if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else if (is_lower(t)) {
            if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);

    SvmSolution sol;
    sol.model.kernel = cfg.kernel;
    sol.model.gamma = gamma;
    sol.model.bias = -rho;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0.0) {
            sol.model.support_vectors.push_back(data.x[t]);
            sol.model.coef.push_back(alpha[t] * y[t]);
        }
    }
    sol.alpha = std::move(alpha);
    sol.upper_bound = std::move(upper);
    sol.iterations = iter;
    sol.kkt_gap = gap;
    return sol;
}

}  // namespace mosaic::ml
