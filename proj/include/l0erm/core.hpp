#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace l0erm {

using DenseVector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Sorted, duplicate-free set of coordinate indices in [0, p).
class SupportSet {
public:
    SupportSet() = default;
    explicit SupportSet(std::size_t dimension) : dim_(dimension) {}
    /// Sorts and validates; throws std::invalid_argument on duplicates or out-of-range indices.
    SupportSet(std::vector<std::size_t> indices, std::size_t dimension);
    SupportSet(std::initializer_list<std::size_t> indices, std::size_t dimension)
        : SupportSet(std::vector<std::size_t>(indices), dimension) {}

    static SupportSet full(std::size_t dimension);

    std::size_t dimension() const { return dim_; }
    std::size_t size() const { return idx_.size(); }
    bool empty() const { return idx_.empty(); }
    const std::vector<std::size_t>& indices() const { return idx_; }
    std::size_t operator[](std::size_t i) const { return idx_[i]; }
    auto begin() const { return idx_.begin(); }
    auto end() const { return idx_.end(); }

    bool contains(std::size_t i) const;
    bool is_subset_of(const SupportSet& other) const;

    friend bool operator==(const SupportSet&, const SupportSet&) = default;
    /// Lexicographic order on the index sequence.
    friend bool operator<(const SupportSet& a, const SupportSet& b) { return a.idx_ < b.idx_; }

private:
    std::vector<std::size_t> idx_;
    std::size_t dim_ = 0;
};

/// n samples: features row-major (n x p), responses length n.
class Dataset {
public:
    Dataset() = default;
    Dataset(RowMatrix features, DenseVector responses);

    std::size_t n() const { return static_cast<std::size_t>(x_.rows()); }
    std::size_t p() const { return static_cast<std::size_t>(x_.cols()); }
    const RowMatrix& features() const { return x_; }
    const DenseVector& responses() const { return y_; }

    /// Copy of this dataset with sample `i` replaced.
    Dataset with_sample_replaced(std::size_t i, const DenseVector& x, double y) const;

private:
    RowMatrix x_;
    DenseVector y_;
};

enum class LossKind { Squared, Logistic };

std::string to_string(LossKind kind);

/// Default logistic margin factor: loss log(1 + exp(-2 y w'x)).
inline constexpr double kDefaultMarginScale = 2.0;

/// Sparsity-constrained ERM instance: min F_S(w) = (1/n) sum loss(w; x_i, y_i).
class Problem {
public:
    Problem(LossKind kind, Dataset data, double margin_scale = kDefaultMarginScale);

    LossKind loss_kind() const { return kind_; }
    const Dataset& data() const { return data_; }
    double margin_scale() const { return margin_scale_; }
    std::size_t n() const { return data_.n(); }
    std::size_t p() const { return data_.p(); }

private:
    LossKind kind_;
    Dataset data_;
    double margin_scale_;
};

/// Indices with |w_i| > tol.
SupportSet support_of(const DenseVector& w, double tol = 0.0);

/// w on J, zero elsewhere.
DenseVector restrict(const DenseVector& w, const SupportSet& support);

/// min over supp(w) of |w_i|; throws std::domain_error for the zero vector.
double smallest_nonzero_magnitude(const DenseVector& w);

/// Throws std::invalid_argument when any entry is NaN or infinite.
void require_finite(const DenseVector& w, const char* what);

std::size_t count_nonzeros(const DenseVector& w);

}  // namespace l0erm
