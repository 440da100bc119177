#pragma once

#include "l0erm/core.hpp"
#include "l0erm/ground_truth.hpp"

#include <memory>
#include <optional>
#include <stdexcept>

namespace l0erm {

struct IhtParams {
    std::size_t k = 1;
    /// nullopt selects 2 / (3 L).
    std::optional<double> step_size;
    std::size_t max_iters = 1000;
    /// Early stop once the gradient restricted to supp(w) has norm <= grad_tol
    /// and the support has not changed for two consecutive steps.
    double grad_tol = 1e-8;
    /// Defaults to the zero vector; must be k-sparse.
    std::optional<DenseVector> w0;
    bool record_trace = false;
    /// Also compute the support-restricted minimizer of the final iterate.
    bool debias = true;
};

/// Run record. iterates/objectives/supports are indexed by t = 0..iters_run
/// (entry 0 is w0); margins by t = 1..iters_run (margins[t-1] is the margin of
/// the pre-threshold vector w(t-1) - eta grad F(w(t-1))). Iterates are stored
/// only when the trace is recorded.
struct IhtTrace {
    std::vector<DenseVector> iterates;
    std::vector<double> objectives;
    std::vector<SupportSet> supports;
    std::vector<double> margins;
    bool converged = false;
    std::size_t iters_run = 0;

    double min_margin() const;
};

struct SolveReport {
    DenseVector solution;
    std::optional<DenseVector> debiased;
    double objective = 0.0;
    /// Kept set of the final thresholding step (|support| = min(k, p)).
    SupportSet support;
    std::optional<IhtTrace> trace;
    std::size_t iters_run = 0;
    bool converged = false;
    double step_size = 0.0;
    /// Smallest hard-thresholding margin seen along the run.
    double min_margin = 0.0;
};

/// Thrown when an iteration produces a non-finite objective.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::size_t iteration, const std::string& what)
        : std::runtime_error(what), iteration_(iteration) {}
    std::size_t iteration() const { return iteration_; }

private:
    std::size_t iteration_;
};

/// Thrown when the restricted Newton solve hits its iteration cap.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(double gradient_norm, const std::string& what)
        : std::runtime_error(what), gradient_norm_(gradient_norm) {}
    double gradient_norm() const { return gradient_norm_; }

private:
    double gradient_norm_;
};

/// Thrown by the brute-force oracle when the instance is too large.
class CapExceededError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Curvature of a feature matrix that can be shared by every solve on it.
struct FeatureCurvature {
    /// X'X / n; only used for the squared loss.
    std::shared_ptr<const Matrix> gram;
    /// lambda_max(X'X / n).
    double gram_lambda_max = 0.0;
};

FeatureCurvature prepare_curvature(const RowMatrix& features, bool with_gram);

/// 2 / (3 L).
double default_step_size(double smoothness_L);

/// ceil(32 L^2 / mu^2 * k_bar). Advisory only; never enforced by iht_solve.
std::size_t recommended_sparsity(double smoothness_L, double mu, std::size_t k_bar);

/// Iterative hard thresholding on F_S:
///   w(t) = H_k(w(t-1) - eta grad F_S(w(t-1))).
/// Throws DivergenceError naming the iteration when the objective stops being finite.
SolveReport iht_solve(const Problem& problem, const IhtParams& params, const FeatureCurvature* curvature = nullptr);

/// argmin of F_S over vectors supported on J. Squared loss: minimum-norm least
/// squares on the columns J (singular values below 1e-12 sigma_max dropped).
/// Logistic loss: damped Newton to gradient norm <= 1e-10, at most 200 steps.
DenseVector debias(const Problem& problem, const SupportSet& support);

/// Exact l0-ERM by enumerating every size-k support (lexicographic order) and
/// debiasing each. Objective ties within 1e-12 keep the lexicographically
/// smallest support. Throws CapExceededError when p > p_cap or C(p, k) > 1e6.
SolveReport brute_force_l0_erm(const Problem& problem, std::size_t k, std::size_t p_cap = 20);

/// IHT on the linear population risk F(w) = 1/2 (w - w_bar)' Sigma (w - w_bar) + sigma^2 / 2.
/// Always records the trace.
IhtTrace population_iht_trajectory(const GroundTruth& truth, const IhtParams& params);

/// C(n, k) saturating at max size_t.
std::size_t binomial(std::size_t n, std::size_t k);

}  // namespace l0erm
