#include "l0erm/losses.hpp"

#include "l0erm/datagen.hpp"

#include <cmath>
#include <limits>

namespace l0erm {

double logistic_loss_of_margin(double z) {
    if (z >= 0.0) return std::log1p(std::exp(-z));
    return -z + std::log1p(std::exp(z));
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

namespace {

void check_dimension(const Problem& problem, const DenseVector& w, const char* what) {
    if (static_cast<std::size_t>(w.size()) != problem.p()) {
        throw std::invalid_argument(std::string(what) + ": w has dimension " + std::to_string(w.size()) +
                                    ", problem has p = " + std::to_string(problem.p()));
    }
}

double loss_of_prediction(LossKind kind, double margin_scale, double prediction, double y) {
    if (kind == LossKind::Squared) {
        const double r = y - prediction;
        return 0.5 * r * r;
    }
    return logistic_loss_of_margin(margin_scale * y * prediction);
}

}  // namespace

double sample_loss(const Problem& problem, const DenseVector& w, std::size_t index) {
    check_dimension(problem, w, "sample_loss");
    if (index >= problem.n()) {
        throw std::out_of_range("sample_loss: index " + std::to_string(index) + " out of range for n = " +
                                std::to_string(problem.n()));
    }
    const auto i = static_cast<Eigen::Index>(index);
    const double prediction = problem.data().features().row(i).dot(w);
    return loss_of_prediction(problem.loss_kind(), problem.margin_scale(), prediction, problem.data().responses()[i]);
}

double empirical_risk(const Problem& problem, const DenseVector& w) {
    check_dimension(problem, w, "empirical_risk");
    const DenseVector predictions = problem.data().features() * w;
    const auto& y = problem.data().responses();
    double total = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        total += loss_of_prediction(problem.loss_kind(), problem.margin_scale(), predictions[i], y[i]);
    }
    return total / static_cast<double>(problem.n());
}

DenseVector empirical_gradient(const Problem& problem, const DenseVector& w) {
    check_dimension(problem, w, "empirical_gradient");
    const auto& x = problem.data().features();
    const auto& y = problem.data().responses();
    DenseVector weights = x * w;
    if (problem.loss_kind() == LossKind::Squared) {
        weights -= y;
    } else {
        const double c = problem.margin_scale();
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            weights[i] = -c * y[i] * sigmoid(-c * y[i] * weights[i]);
        }
    }
    return (x.transpose() * weights) / static_cast<double>(problem.n());
}

double power_iteration_max_eigenvalue(const Matrix& symmetric, double rel_tol, int max_iters) {
    const auto dim = symmetric.rows();
    if (dim != symmetric.cols() || dim == 0) throw std::invalid_argument("power iteration: need a square matrix");
    const double scale = symmetric.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;

    auto run = [&](DenseVector v) {
        v.normalize();
        double lambda = 0.0;
        DenseVector av(dim);
        for (int it = 0; it < max_iters; ++it) {
            av.noalias() = symmetric * v;
            const double next = v.dot(av);
            const double norm = av.norm();
            if (norm <= 1e-14 * scale) return 0.0;
            v = av / norm;
            if (it > 0 && std::abs(next - lambda) <= rel_tol * std::abs(next)) return next;
            lambda = next;
        }
        return lambda;
    };

    double lambda = run(DenseVector::Ones(dim));
    if (lambda <= 1e-12 * scale) {
        // All-ones start orthogonal to the dominant eigenspace; restart from the
        // coordinate with the largest diagonal entry.
        Eigen::Index j = 0;
        symmetric.diagonal().maxCoeff(&j);
        lambda = run(DenseVector::Unit(dim, j));
    }
    return lambda;
}

Matrix feature_gram(const RowMatrix& features) {
    const auto p = features.cols();
    Matrix gram = Matrix::Zero(p, p);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(features.transpose(), 1.0 / static_cast<double>(features.rows()));
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
    return gram;
}

double gram_max_eigenvalue(const RowMatrix& features) {
    if (features.rows() >= features.cols()) return power_iteration_max_eigenvalue(feature_gram(features));
    const auto n = features.rows();
    Matrix outer = Matrix::Zero(n, n);
    outer.selfadjointView<Eigen::Lower>().rankUpdate(features, 1.0 / static_cast<double>(n));
    outer.triangularView<Eigen::StrictlyUpper>() = outer.transpose();
    return power_iteration_max_eigenvalue(outer);
}

double smoothness_from_gram_eigenvalue(LossKind kind, double margin_scale, double lambda_max) {
    if (kind == LossKind::Squared) return lambda_max;
    return lambda_max * margin_scale * margin_scale / 4.0;
}

RegularityInfo regularity(const Problem& problem, double domain_radius) {
    if (!(domain_radius > 0.0)) throw std::invalid_argument("regularity: domain radius must be positive");
    const auto& x = problem.data().features();
    const auto& y = problem.data().responses();
    RegularityInfo info;
    info.smoothness_L = smoothness_from_gram_eigenvalue(problem.loss_kind(), problem.margin_scale(),
                                                        gram_max_eigenvalue(x));
    const DenseVector row_norms = x.rowwise().norm();
    const double max_row_norm = row_norms.maxCoeff();
    const bool bounded = std::isfinite(domain_radius);
    if (problem.loss_kind() == LossKind::Squared) {
        if (!bounded) {
            info.lipschitz_G = std::numeric_limits<double>::infinity();
            return info;
        }
        double g = 0.0;
        double m = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double residual_bound = domain_radius * row_norms[i] + std::abs(y[i]);
            g = std::max(g, row_norms[i] * residual_bound);
            m = std::max(m, 0.5 * residual_bound * residual_bound);
        }
        info.lipschitz_G = g;
        info.value_bound_M = m;
    } else {
        const double c = problem.margin_scale();
        info.lipschitz_G = c * max_row_norm;
        if (bounded) info.value_bound_M = logistic_loss_of_margin(-c * domain_radius * max_row_norm);
    }
    return info;
}

double population_risk_linear(const DenseVector& w, const GroundTruth& truth) {
    if (truth.model_kind() != ModelKind::Linear) {
        throw std::invalid_argument("population_risk_linear: ground truth is not a linear model");
    }
    const DenseVector d = w - truth.w_bar();
    return 0.5 * truth.quadratic_form(d) + 0.5 * truth.noise_sigma() * truth.noise_sigma();
}

DenseVector population_gradient_linear(const DenseVector& w, const GroundTruth& truth) {
    if (truth.model_kind() != ModelKind::Linear) {
        throw std::invalid_argument("population_gradient_linear: ground truth is not a linear model");
    }
    return truth.apply_covariance(w - truth.w_bar());
}

namespace {

template <class PerSample>
McEstimate monte_carlo(const GroundTruth& truth, std::size_t m, const Seed& seed, PerSample&& per_sample) {
    if (m == 0) throw std::invalid_argument("Monte Carlo sample count must be positive");
    const auto p = static_cast<Eigen::Index>(truth.p());
    double sum = 0.0;
    double sum_sq = 0.0;
    RowMatrix x;
    DenseVector y;
    const std::size_t chunks = (m + kMonteCarloChunk - 1) / kMonteCarloChunk;
    for (std::size_t c = 0; c < chunks; ++c) {
        const auto rows = static_cast<Eigen::Index>(std::min(kMonteCarloChunk, m - c * kMonteCarloChunk));
        x.resize(rows, p);
        y.resize(rows);
        Rng rng(seed.child("mc-chunk:" + std::to_string(c)));
        sample_rows(truth, rng, x, y);
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double v = per_sample(x.row(i), y[i]);
            sum += v;
            sum_sq += v * v;
        }
    }
    McEstimate est;
    est.samples = m;
    const double count = static_cast<double>(m);
    est.mean = sum / count;
    if (m > 1) {
        const double var = std::max(0.0, (sum_sq - count * est.mean * est.mean) / (count - 1.0));
        est.std_error = std::sqrt(var / count);
    }
    return est;
}

}  // namespace

McEstimate population_risk_monte_carlo(LossKind kind, const DenseVector& w, const GroundTruth& truth,
                                       std::size_t m, const Seed& seed) {
    if (static_cast<std::size_t>(w.size()) != truth.p()) throw std::invalid_argument("Monte Carlo: dimension mismatch");
    const double c = truth.margin_scale();
    return monte_carlo(truth, m, seed, [&](const auto& row, double y) {
        return loss_of_prediction(kind, c, row.dot(w), y);
    });
}

McEstimate monte_carlo_risk_difference(LossKind kind, const DenseVector& w, const DenseVector& w_ref,
                                       const GroundTruth& truth, std::size_t m, const Seed& seed) {
    if (static_cast<std::size_t>(w.size()) != truth.p() || static_cast<std::size_t>(w_ref.size()) != truth.p()) {
        throw std::invalid_argument("Monte Carlo: dimension mismatch");
    }
    const double c = truth.margin_scale();
    return monte_carlo(truth, m, seed, [&](const auto& row, double y) {
        return loss_of_prediction(kind, c, row.dot(w), y) - loss_of_prediction(kind, c, row.dot(w_ref), y);
    });
}

}  // namespace l0erm
