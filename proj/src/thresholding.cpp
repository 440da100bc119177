#include "l0erm/thresholding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace l0erm {

namespace {

struct Selection {
    std::vector<std::size_t> kept;  // unsorted
    double kth = 0.0;               // |[w]_(k)|
    double next = 0.0;              // |[w]_(k+1)|, valid when k < p
};

// Orders by magnitude descending, then index ascending. This is a strict total
// order, so the first k elements after selection are exactly the sorted-order top k.
Selection select_top(const DenseVector& w, std::size_t k) {
    if (k == 0) throw std::invalid_argument("hard thresholding: k must be at least 1");
    require_finite(w, "hard thresholding");
    const auto p = static_cast<std::size_t>(w.size());
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto before = [&w](std::size_t a, std::size_t b) {
        const double ma = std::abs(w[static_cast<Eigen::Index>(a)]);
        const double mb = std::abs(w[static_cast<Eigen::Index>(b)]);
        return ma > mb || (ma == mb && a < b);
    };
    Selection sel;
    if (k >= p) {
        sel.kept = std::move(order);
        return sel;
    }
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), before);
    // order[k] is the (k+1)-th element; everything before it is the top k.
    sel.next = std::abs(w[static_cast<Eigen::Index>(order[k])]);
    sel.kth = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) sel.kth = std::min(sel.kth, std::abs(w[static_cast<Eigen::Index>(order[i])]));
    order.resize(k);
    sel.kept = std::move(order);
    return sel;
}

}  // namespace

ThresholdOutcome hard_threshold(const DenseVector& w, std::size_t k) {
    Selection sel = select_top(w, k);
    const auto p = static_cast<std::size_t>(w.size());
    ThresholdOutcome out;
    out.kept = SupportSet(std::move(sel.kept), p);
    out.vector = restrict(w, out.kept);
    if (k >= p) {
        out.margin = std::numeric_limits<double>::infinity();
        out.tie_broken = false;
    } else {
        out.margin = sel.kth - sel.next;
        out.tie_broken = sel.kth == sel.next;
    }
    return out;
}

double ht_stability_margin(const DenseVector& w, std::size_t k) {
    if (k >= static_cast<std::size_t>(w.size())) return std::numeric_limits<double>::infinity();
    const Selection sel = select_top(w, k);
    return sel.kth - sel.next;
}

SupportSet top_k_indices(const DenseVector& w, std::size_t k) { return hard_threshold(w, k).kept; }

}  // namespace l0erm
