#pragma once

#include "l0erm/core.hpp"
#include "l0erm/ground_truth.hpp"
#include "l0erm/rng.hpp"

#include <optional>

namespace l0erm {

/// Regularity constants of F_S over a ball of radius R.
struct RegularityInfo {
    double smoothness_L = 0.0;
    double lipschitz_G = 0.0;
    /// nullopt when the loss is unbounded over the domain (infinite radius).
    std::optional<double> value_bound_M;
};

/// log(1 + exp(-z)) without overflow.
double logistic_loss_of_margin(double z);
/// 1 / (1 + exp(-z)) without overflow.
double sigmoid(double z);

double sample_loss(const Problem& problem, const DenseVector& w, std::size_t index);
double empirical_risk(const Problem& problem, const DenseVector& w);
DenseVector empirical_gradient(const Problem& problem, const DenseVector& w);

/// Largest eigenvalue of a symmetric PSD matrix by power iteration from the
/// normalized all-ones vector. Stops when the Rayleigh quotient changes by at
/// most rel_tol (relative) or after max_iters steps.
double power_iteration_max_eigenvalue(const Matrix& symmetric, double rel_tol = 1e-8, int max_iters = 1000);

/// X'X / n for row-major X (p x p).
Matrix feature_gram(const RowMatrix& features);

/// lambda_max(X'X / n), computed on whichever of X'X/n and XX'/n is smaller.
double gram_max_eigenvalue(const RowMatrix& features);

/// Smoothness constant for a loss given lambda_max(X'X/n): unchanged for the
/// squared loss, scaled by c^2/4 for the logistic loss.
double smoothness_from_gram_eigenvalue(LossKind kind, double margin_scale, double lambda_max);

RegularityInfo regularity(const Problem& problem, double domain_radius);

/// F(w) = 1/2 (w - w_bar)' Sigma (w - w_bar) + sigma^2 / 2.
double population_risk_linear(const DenseVector& w, const GroundTruth& truth);
/// Sigma (w - w_bar).
DenseVector population_gradient_linear(const DenseVector& w, const GroundTruth& truth);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

/// Empirical risk of `w` on m fresh samples drawn from `truth`. Samples are
/// generated in fixed-size chunks, each from its own substream of `seed`.
McEstimate population_risk_monte_carlo(LossKind kind, const DenseVector& w, const GroundTruth& truth,
                                       std::size_t m, const Seed& seed);

/// Mean of loss(w) - loss(w_ref) over the same m samples that
/// population_risk_monte_carlo draws for `seed`.
McEstimate monte_carlo_risk_difference(LossKind kind, const DenseVector& w, const DenseVector& w_ref,
                                       const GroundTruth& truth, std::size_t m, const Seed& seed);

inline constexpr std::size_t kMonteCarloChunk = 4096;

}  // namespace l0erm
