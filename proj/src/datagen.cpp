#include "l0erm/datagen.hpp"

#include "l0erm/dataset_io.hpp"
#include "l0erm/losses.hpp"

#include <numeric>

namespace l0erm {

std::string describe(const SignalScheme& scheme) {
    return std::visit(
        [](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, GaussianSparse>) {
                return "gaussian_sparse(k_bar=" + std::to_string(s.k_bar) +
                       ",nonzero_sigma=" + format_double(s.nonzero_sigma) + ")";
            } else if constexpr (std::is_same_v<T, ScaledFixed>) {
                return "scaled_fixed(k_bar=" + std::to_string(s.k_bar) + ",r=" + format_double(s.r) + ")";
            } else {
                return "nearly_sparse(k_bar=" + std::to_string(s.k_bar) +
                       ",perturb_sigma=" + format_double(s.perturb_sigma) +
                       ",nonzero_sigma=" + format_double(s.nonzero_sigma) + ")";
            }
        },
        scheme);
}

DenseVector gaussian_sparse_vector(std::size_t p, std::size_t k_bar, double nonzero_sigma, Rng& rng) {
    if (k_bar > p) {
        throw std::invalid_argument("k_bar = " + std::to_string(k_bar) + " exceeds dimension " + std::to_string(p));
    }
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < k_bar; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.uniform_index(p - i));
        std::swap(order[i], order[j]);
    }
    DenseVector w = DenseVector::Zero(static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < k_bar; ++i) {
        w[static_cast<Eigen::Index>(order[i])] = nonzero_sigma * rng.normal();
    }
    return w;
}

GroundTruth gen_ground_truth(std::size_t p, const SignalScheme& scheme, double sigma, ModelKind kind,
                             const Seed& seed, Covariance covariance, double margin_scale) {
    if (p == 0) throw std::invalid_argument("gen_ground_truth: p must be positive");
    Rng signal_rng(seed.child("signal"));
    DenseVector w = std::visit(
        [&](const auto& s) -> DenseVector {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, GaussianSparse>) {
                if (!(s.nonzero_sigma >= 0.0)) throw std::invalid_argument("nonzero_sigma must be nonnegative");
                return gaussian_sparse_vector(p, s.k_bar, s.nonzero_sigma, signal_rng);
            } else if constexpr (std::is_same_v<T, ScaledFixed>) {
                if (!(s.r > 0.0)) throw std::invalid_argument("signal strength r must be positive");
                return s.r * gaussian_sparse_vector(p, s.k_bar, 1.0, signal_rng);
            } else {
                if (!(s.perturb_sigma >= 0.0)) throw std::invalid_argument("perturb_sigma must be nonnegative");
                if (!(s.nonzero_sigma >= 0.0)) throw std::invalid_argument("nonzero_sigma must be nonnegative");
                DenseVector base = gaussian_sparse_vector(p, s.k_bar, s.nonzero_sigma, signal_rng);
                if (s.perturb_sigma > 0.0) {
                    Rng noise_rng(seed.child("perturb"));
                    for (Eigen::Index i = 0; i < base.size(); ++i) base[i] += s.perturb_sigma * noise_rng.normal();
                }
                return base;
            }
        },
        scheme);
    return GroundTruth(std::move(w), sigma, std::move(covariance), kind, margin_scale);
}

void sample_rows(const GroundTruth& truth, Rng& rng, Eigen::Ref<RowMatrix> x, Eigen::Ref<DenseVector> y) {
    const auto p = static_cast<Eigen::Index>(truth.p());
    if (x.cols() != p || x.rows() != y.size()) throw std::invalid_argument("sample_rows: shape mismatch");
    const bool linear = truth.model_kind() == ModelKind::Linear;
    const bool identity = std::holds_alternative<IdentityCovariance>(truth.covariance());
    DenseVector z(p);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < p; ++j) z[j] = rng.normal();
        if (!identity) truth.color(z);
        x.row(i) = z.transpose();
        if (linear) {
            y[i] = truth.noise_sigma() * rng.normal();
        } else {
            const double prob_positive = sigmoid(truth.margin_scale() * z.dot(truth.w_bar()));
            y[i] = rng.uniform() < prob_positive ? 1.0 : -1.0;
        }
    }
    if (linear) y.noalias() += x * truth.w_bar();
}

namespace {

Dataset generate(const GroundTruth& truth, std::size_t n, const Seed& seed) {
    if (n == 0) throw std::invalid_argument("dataset size n must be positive");
    RowMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(truth.p()));
    DenseVector y(static_cast<Eigen::Index>(n));
    Rng rng(seed);
    sample_rows(truth, rng, x, y);
    return Dataset(std::move(x), std::move(y));
}

}  // namespace

Dataset gen_linear_dataset(const GroundTruth& truth, std::size_t n, const Seed& seed) {
    if (truth.model_kind() != ModelKind::Linear) throw std::invalid_argument("gen_linear_dataset: truth is not linear");
    return generate(truth, n, seed);
}

Dataset gen_logistic_dataset(const GroundTruth& truth, std::size_t n, const Seed& seed) {
    if (truth.model_kind() != ModelKind::Logistic) {
        throw std::invalid_argument("gen_logistic_dataset: truth is not logistic");
    }
    return generate(truth, n, seed);
}

Dataset gen_dataset(const GroundTruth& truth, std::size_t n, const Seed& seed) { return generate(truth, n, seed); }

}  // namespace l0erm
