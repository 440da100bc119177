#pragma once

#include "l0erm/core.hpp"

#include <memory>
#include <variant>

namespace l0erm {

struct IdentityCovariance {};
struct DiagonalCovariance {
    DenseVector values;
};
struct DenseCovariance {
    Matrix matrix;
};
using Covariance = std::variant<IdentityCovariance, DiagonalCovariance, DenseCovariance>;

enum class ModelKind { Linear, Logistic };

std::string to_string(ModelKind kind);

/// Generative model behind a synthetic experiment: features x ~ N(0, Sigma);
/// linear responses y = w_bar'x + N(0, sigma^2); logistic labels
/// P(y = +1 | x) = sigmoid(margin_scale * w_bar'x).
class GroundTruth {
public:
    /// Validates the covariance (diagonal entries >= 0; dense matrices are
    /// symmetric PSD up to a small relative tolerance) and precomputes a factor
    /// A with Sigma = A A'.
    GroundTruth(DenseVector w_bar, double noise_sigma, Covariance covariance = IdentityCovariance{},
                ModelKind kind = ModelKind::Linear, double margin_scale = kDefaultMarginScale);

    const DenseVector& w_bar() const { return w_bar_; }
    double noise_sigma() const { return sigma_; }
    const Covariance& covariance() const { return cov_; }
    ModelKind model_kind() const { return kind_; }
    double margin_scale() const { return margin_scale_; }
    std::size_t p() const { return static_cast<std::size_t>(w_bar_.size()); }

    /// d' Sigma d.
    double quadratic_form(const DenseVector& d) const;
    /// Sigma d.
    DenseVector apply_covariance(const DenseVector& d) const;
    /// Maps standard normals z to A z ~ N(0, Sigma).
    void color(Eigen::Ref<Eigen::VectorXd> z) const;
    double max_covariance_eigenvalue() const;

private:
    DenseVector w_bar_;
    double sigma_;
    Covariance cov_;
    ModelKind kind_;
    double margin_scale_;
    std::shared_ptr<const Matrix> factor_;  // dense covariance only
    double max_eig_ = 1.0;
};

}  // namespace l0erm
