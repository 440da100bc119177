#include "l0erm/ground_truth.hpp"

#include <cmath>

namespace l0erm {

std::string to_string(ModelKind kind) {
    return kind == ModelKind::Linear ? "linear" : "logistic";
}

GroundTruth::GroundTruth(DenseVector w_bar, double noise_sigma, Covariance covariance, ModelKind kind,
                         double margin_scale)
    : w_bar_(std::move(w_bar)), sigma_(noise_sigma), cov_(std::move(covariance)), kind_(kind),
      margin_scale_(margin_scale) {
    if (w_bar_.size() == 0) throw std::invalid_argument("GroundTruth: empty w_bar");
    require_finite(w_bar_, "GroundTruth w_bar");
    if (!(sigma_ >= 0.0) || !std::isfinite(sigma_)) {
        throw std::invalid_argument("GroundTruth: noise sigma must be finite and nonnegative");
    }
    if (!(margin_scale_ > 0.0)) throw std::invalid_argument("GroundTruth: margin_scale must be positive");
    const auto p = w_bar_.size();
    if (auto* diag = std::get_if<DiagonalCovariance>(&cov_)) {
        if (diag->values.size() != p) throw std::invalid_argument("GroundTruth: diagonal covariance size mismatch");
        if (!diag->values.allFinite() || (diag->values.array() < 0.0).any()) {
            throw std::invalid_argument("GroundTruth: diagonal covariance must be finite and nonnegative");
        }
        max_eig_ = diag->values.maxCoeff();
    } else if (auto* dense = std::get_if<DenseCovariance>(&cov_)) {
        const Matrix& s = dense->matrix;
        if (s.rows() != p || s.cols() != p) throw std::invalid_argument("GroundTruth: dense covariance must be p x p");
        if (!s.allFinite()) throw std::invalid_argument("GroundTruth: dense covariance has non-finite entries");
        const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
        if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
            throw std::invalid_argument("GroundTruth: dense covariance is not symmetric");
        }
        Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
        if (eig.info() != Eigen::Success) throw std::invalid_argument("GroundTruth: covariance factorization failed");
        const auto& values = eig.eigenvalues();
        max_eig_ = values.maxCoeff();
        if (values.minCoeff() < -1e-10 * std::max(1.0, max_eig_)) {
            throw std::invalid_argument("GroundTruth: dense covariance is not positive semidefinite");
        }
        const DenseVector roots = values.cwiseMax(0.0).cwiseSqrt();
        factor_ = std::make_shared<const Matrix>(eig.eigenvectors() * roots.asDiagonal());
    }
}

double GroundTruth::quadratic_form(const DenseVector& d) const {
    if (d.size() != w_bar_.size()) throw std::invalid_argument("quadratic_form: dimension mismatch");
    if (auto* diag = std::get_if<DiagonalCovariance>(&cov_)) return d.cwiseProduct(diag->values).dot(d);
    if (auto* dense = std::get_if<DenseCovariance>(&cov_)) return d.dot(dense->matrix * d);
    return d.squaredNorm();
}

DenseVector GroundTruth::apply_covariance(const DenseVector& d) const {
    if (d.size() != w_bar_.size()) throw std::invalid_argument("apply_covariance: dimension mismatch");
    if (auto* diag = std::get_if<DiagonalCovariance>(&cov_)) return d.cwiseProduct(diag->values);
    if (auto* dense = std::get_if<DenseCovariance>(&cov_)) return dense->matrix * d;
    return d;
}

void GroundTruth::color(Eigen::Ref<Eigen::VectorXd> z) const {
    if (auto* diag = std::get_if<DiagonalCovariance>(&cov_)) {
        z.array() *= diag->values.array().sqrt();
    } else if (factor_) {
        const DenseVector tmp = (*factor_) * z;
        z = tmp;
    }
}

double GroundTruth::max_covariance_eigenvalue() const { return max_eig_; }

}  // namespace l0erm
