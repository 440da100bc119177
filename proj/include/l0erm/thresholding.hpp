#pragma once

#include "l0erm/core.hpp"

namespace l0erm {

/// Result of keeping the k largest-magnitude entries.
struct ThresholdOutcome {
    DenseVector vector;
    SupportSet kept;
    /// |[w]_(k)| - |[w]_(k+1)|; +infinity when k >= p.
    double margin = 0.0;
    /// True iff the k-th and (k+1)-th magnitudes are equal.
    bool tie_broken = false;
};

/// H_k. Ties in magnitude go to the lowest index. Throws std::invalid_argument
/// for k = 0 or non-finite input.
ThresholdOutcome hard_threshold(const DenseVector& w, std::size_t k);

/// |[w]_(k)| - |[w]_(k+1)| in sorted-magnitude order; +infinity when k >= p.
double ht_stability_margin(const DenseVector& w, std::size_t k);

SupportSet top_k_indices(const DenseVector& w, std::size_t k);

}  // namespace l0erm
