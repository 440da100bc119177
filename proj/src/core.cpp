#include "l0erm/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace l0erm {

SupportSet::SupportSet(std::vector<std::size_t> indices, std::size_t dimension)
    : idx_(std::move(indices)), dim_(dimension) {
    std::sort(idx_.begin(), idx_.end());
    if (std::adjacent_find(idx_.begin(), idx_.end()) != idx_.end()) {
        throw std::invalid_argument("SupportSet: duplicate index");
    }
    if (!idx_.empty() && idx_.back() >= dim_) {
        throw std::invalid_argument("SupportSet: index " + std::to_string(idx_.back()) +
                                    " out of range for dimension " + std::to_string(dim_));
    }
}

SupportSet SupportSet::full(std::size_t dimension) {
    std::vector<std::size_t> all(dimension);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return SupportSet(std::move(all), dimension);
}

bool SupportSet::contains(std::size_t i) const {
    return std::binary_search(idx_.begin(), idx_.end(), i);
}

bool SupportSet::is_subset_of(const SupportSet& other) const {
    return std::includes(other.idx_.begin(), other.idx_.end(), idx_.begin(), idx_.end());
}

Dataset::Dataset(RowMatrix features, DenseVector responses)
    : x_(std::move(features)), y_(std::move(responses)) {
    if (x_.rows() != y_.size()) {
        throw std::invalid_argument("Dataset: " + std::to_string(x_.rows()) + " feature rows but " +
                                    std::to_string(y_.size()) + " responses");
    }
    if (x_.rows() == 0 || x_.cols() == 0) {
        throw std::invalid_argument("Dataset: n and p must be positive");
    }
    if (!x_.allFinite()) {
        throw std::invalid_argument("Dataset: non-finite feature entry");
    }
    if (!y_.allFinite()) {
        throw std::invalid_argument("Dataset: non-finite response");
    }
}

Dataset Dataset::with_sample_replaced(std::size_t i, const DenseVector& x, double y) const {
    if (i >= n()) throw std::out_of_range("Dataset: replacement index out of range");
    if (static_cast<std::size_t>(x.size()) != p()) {
        throw std::invalid_argument("Dataset: replacement sample has wrong dimension");
    }
    RowMatrix features = x_;
    DenseVector responses = y_;
    features.row(static_cast<Eigen::Index>(i)) = x.transpose();
    responses[static_cast<Eigen::Index>(i)] = y;
    return Dataset(std::move(features), std::move(responses));
}

std::string to_string(LossKind kind) {
    return kind == LossKind::Squared ? "squared" : "logistic";
}

Problem::Problem(LossKind kind, Dataset data, double margin_scale)
    : kind_(kind), data_(std::move(data)), margin_scale_(margin_scale) {
    if (!(margin_scale_ > 0.0) || !std::isfinite(margin_scale_)) {
        throw std::invalid_argument("Problem: margin_scale must be positive");
    }
    if (kind_ == LossKind::Logistic) {
        const auto& y = data_.responses();
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            if (y[i] != 1.0 && y[i] != -1.0) {
                throw std::invalid_argument("Problem: logistic responses must be -1 or +1 (sample " +
                                            std::to_string(i) + ")");
            }
        }
    }
}

SupportSet support_of(const DenseVector& w, double tol) {
    if (tol < 0.0) throw std::invalid_argument("support_of: tol must be nonnegative");
    std::vector<std::size_t> idx;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (std::abs(w[i]) > tol) idx.push_back(static_cast<std::size_t>(i));
    }
    return SupportSet(std::move(idx), static_cast<std::size_t>(w.size()));
}

DenseVector restrict(const DenseVector& w, const SupportSet& support) {
    if (support.dimension() != static_cast<std::size_t>(w.size())) {
        throw std::invalid_argument("restrict: support dimension " + std::to_string(support.dimension()) +
                                    " != vector dimension " + std::to_string(w.size()));
    }
    DenseVector out = DenseVector::Zero(w.size());
    for (auto i : support) out[static_cast<Eigen::Index>(i)] = w[static_cast<Eigen::Index>(i)];
    return out;
}

double smallest_nonzero_magnitude(const DenseVector& w) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w[i] != 0.0) best = std::min(best, std::abs(w[i]));
    }
    if (std::isinf(best)) throw std::domain_error("smallest_nonzero_magnitude: vector has no nonzero entry");
    return best;
}

void require_finite(const DenseVector& w, const char* what) {
    if (!w.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

std::size_t count_nonzeros(const DenseVector& w) {
    return static_cast<std::size_t>((w.array() != 0.0).count());
}

}  // namespace l0erm
