#pragma once

#include "l0erm/core.hpp"
#include "l0erm/ground_truth.hpp"
#include "l0erm/rng.hpp"

#include <variant>

namespace l0erm {

/// k_bar-sparse vector, support uniform, nonzeros N(0, nonzero_sigma^2).
struct GaussianSparse {
    std::size_t k_bar = 0;
    double nonzero_sigma = 1.0;
};

/// r * w_tilde, where w_tilde is the GaussianSparse(k_bar) draw of the same seed.
struct ScaledFixed {
    std::size_t k_bar = 0;
    double r = 1.0;
};

/// GaussianSparse draw plus dense N(0, perturb_sigma^2) noise on every coordinate.
struct NearlySparse {
    std::size_t k_bar = 0;
    double perturb_sigma = 0.01;
    double nonzero_sigma = 1.0;
};

using SignalScheme = std::variant<GaussianSparse, ScaledFixed, NearlySparse>;

std::string describe(const SignalScheme& scheme);

/// Support positions come from a seeded Fisher-Yates prefix over [0, p).
DenseVector gaussian_sparse_vector(std::size_t p, std::size_t k_bar, double nonzero_sigma, Rng& rng);

GroundTruth gen_ground_truth(std::size_t p, const SignalScheme& scheme, double sigma, ModelKind kind,
                             const Seed& seed, Covariance covariance = IdentityCovariance{},
                             double margin_scale = kDefaultMarginScale);

/// Fills rows of x with N(0, Sigma) draws and y with responses (linear) or
/// labels (logistic). Each row consumes p normals followed by one normal
/// (noise) or one uniform (label), in that order.
void sample_rows(const GroundTruth& truth, Rng& rng, Eigen::Ref<RowMatrix> x, Eigen::Ref<DenseVector> y);

Dataset gen_linear_dataset(const GroundTruth& truth, std::size_t n, const Seed& seed);
Dataset gen_logistic_dataset(const GroundTruth& truth, std::size_t n, const Seed& seed);
/// Dispatches on truth.model_kind().
Dataset gen_dataset(const GroundTruth& truth, std::size_t n, const Seed& seed);

}  // namespace l0erm
