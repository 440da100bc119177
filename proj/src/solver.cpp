#include "l0erm/solver.hpp"

#include "l0erm/losses.hpp"
#include "l0erm/thresholding.hpp"

#include <cmath>
#include <limits>

namespace l0erm {

double IhtTrace::min_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : margins) m = std::min(m, v);
    return m;
}

FeatureCurvature prepare_curvature(const RowMatrix& features, bool with_gram) {
    FeatureCurvature c;
    if (with_gram) {
        auto gram = std::make_shared<Matrix>(feature_gram(features));
        c.gram_lambda_max = power_iteration_max_eigenvalue(*gram);
        c.gram = std::move(gram);
    } else {
        c.gram_lambda_max = gram_max_eigenvalue(features);
    }
    return c;
}

double default_step_size(double smoothness_L) {
    if (!(smoothness_L > 0.0) || !std::isfinite(smoothness_L)) {
        throw std::invalid_argument("default_step_size: L must be positive and finite");
    }
    return 2.0 / (3.0 * smoothness_L);
}

std::size_t recommended_sparsity(double smoothness_L, double mu, std::size_t k_bar) {
    if (!(smoothness_L > 0.0) || !(mu > 0.0)) throw std::invalid_argument("recommended_sparsity: L and mu must be positive");
    const double ratio = smoothness_L / mu;
    return static_cast<std::size_t>(std::ceil(32.0 * ratio * ratio * static_cast<double>(k_bar)));
}

std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 result = 1;
    for (std::size_t i = 0; i < k; ++i) {
        result = result * (n - i) / (i + 1);
        if (result > std::numeric_limits<std::size_t>::max()) return std::numeric_limits<std::size_t>::max();
    }
    return static_cast<std::size_t>(result);
}

namespace {

using IndexList = std::vector<Eigen::Index>;

IndexList nonzero_indices(const DenseVector& w) {
    IndexList nz;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w[i] != 0.0) nz.push_back(i);
    }
    return nz;
}

/// Objective and gradient of the function IHT descends.
class Objective {
public:
    virtual ~Objective() = default;
    /// Returns F(w) and writes grad F(w). `nz` lists the nonzeros of w.
    virtual double evaluate(const DenseVector& w, const IndexList& nz, DenseVector& grad) = 0;
};

class DirectObjective final : public Objective {
public:
    explicit DirectObjective(const Problem& problem) : problem_(problem) {}

    double evaluate(const DenseVector& w, const IndexList& nz, DenseVector& grad) override {
        const auto& x = problem_.data().features();
        const auto& y = problem_.data().responses();
        const double n = static_cast<double>(problem_.n());
        if (4 * nz.size() < static_cast<std::size_t>(w.size())) {
            pred_.noalias() = x(Eigen::placeholders::all, nz) * w(nz);
        } else {
            pred_.noalias() = x * w;
        }
        double value = 0.0;
        if (problem_.loss_kind() == LossKind::Squared) {
            pred_ -= y;
            value = 0.5 * pred_.squaredNorm() / n;
        } else {
            const double c = problem_.margin_scale();
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                const double z = c * y[i] * pred_[i];
                value += logistic_loss_of_margin(z);
                pred_[i] = -c * y[i] * sigmoid(-z);
            }
            value /= n;
        }
        grad.noalias() = x.transpose() * pred_;
        grad /= n;
        return value;
    }

private:
    const Problem& problem_;
    DenseVector pred_;
};

/// Squared loss through the Gram matrix: grad = G w - b, F = 1/2 w'Gw - b'w + y'y/(2n).
/// With `exact_values` the objective is recomputed from residuals instead, which
/// avoids cancellation when F_S is close to zero.
class GramObjective final : public Objective {
public:
    GramObjective(const Problem& problem, const Matrix& gram, bool exact_values)
        : problem_(problem), gram_(gram), exact_(exact_values) {
        const auto& x = problem.data().features();
        const auto& y = problem.data().responses();
        const double n = static_cast<double>(problem.n());
        b_ = (x.transpose() * y) / n;
        offset_ = 0.5 * y.squaredNorm() / n;
    }

    double evaluate(const DenseVector& w, const IndexList& nz, DenseVector& grad) override {
        grad = -b_;
        for (auto j : nz) grad.noalias() += w[j] * gram_.col(j);
        if (exact_) {
            const auto& x = problem_.data().features();
            DenseVector r = x(Eigen::placeholders::all, nz) * w(nz) - problem_.data().responses();
            return 0.5 * r.squaredNorm() / static_cast<double>(problem_.n());
        }
        double value = offset_;
        for (auto j : nz) value += 0.5 * w[j] * (grad[j] - b_[j]);
        return value;
    }

private:
    const Problem& problem_;
    const Matrix& gram_;
    bool exact_;
    DenseVector b_;
    double offset_ = 0.0;
};

class PopulationObjective final : public Objective {
public:
    explicit PopulationObjective(const GroundTruth& truth) : truth_(truth) {}

    double evaluate(const DenseVector& w, const IndexList&, DenseVector& grad) override {
        grad = population_gradient_linear(w, truth_);
        return population_risk_linear(w, truth_);
    }

private:
    const GroundTruth& truth_;
};

void validate(const IhtParams& params, std::size_t p) {
    if (params.k == 0) throw std::invalid_argument("IHT: k must be at least 1");
    if (params.max_iters == 0) throw std::invalid_argument("IHT: max_iters must be at least 1");
    if (!(params.grad_tol >= 0.0)) throw std::invalid_argument("IHT: grad_tol must be nonnegative");
    if (params.step_size && !(*params.step_size > 0.0 && std::isfinite(*params.step_size))) {
        throw std::invalid_argument("IHT: step size must be positive");
    }
    if (params.w0) {
        if (static_cast<std::size_t>(params.w0->size()) != p) throw std::invalid_argument("IHT: w0 has wrong dimension");
        require_finite(*params.w0, "IHT w0");
        if (count_nonzeros(*params.w0) > params.k) throw std::invalid_argument("IHT: w0 has more than k nonzeros");
    }
}

struct IhtRun {
    DenseVector w;
    SupportSet kept;
    IhtTrace trace;
    double objective = 0.0;
};

double restricted_norm(const DenseVector& grad, const IndexList& nz) {
    double s = 0.0;
    for (auto j : nz) s += grad[j] * grad[j];
    return std::sqrt(s);
}

IhtRun run_iht(Objective& objective, std::size_t p, const IhtParams& params, double eta, bool keep_iterates) {
    IhtRun run;
    run.w = params.w0 ? *params.w0 : DenseVector::Zero(static_cast<Eigen::Index>(p));
    DenseVector grad(static_cast<Eigen::Index>(p));
    IndexList nz = nonzero_indices(run.w);
    double f = objective.evaluate(run.w, nz, grad);
    if (!std::isfinite(f)) throw DivergenceError(0, "IHT: non-finite objective at the initial point");

    auto& trace = run.trace;
    auto record = [&](double value) {
        if (!keep_iterates) return;
        trace.iterates.push_back(run.w);
        trace.objectives.push_back(value);
        trace.supports.push_back(support_of(run.w));
    };
    record(f);

    SupportSet prev1 = support_of(run.w);
    SupportSet prev2;
    DenseVector pre(static_cast<Eigen::Index>(p));
    for (std::size_t t = 1; t <= params.max_iters; ++t) {
        pre = run.w - eta * grad;
        if (!pre.allFinite()) {
            throw DivergenceError(t, "IHT diverged at iteration " + std::to_string(t) + ": non-finite iterate");
        }
        ThresholdOutcome out = hard_threshold(pre, params.k);
        trace.margins.push_back(out.margin);
        run.w = std::move(out.vector);
        run.kept = std::move(out.kept);
        nz = nonzero_indices(run.w);
        f = objective.evaluate(run.w, nz, grad);
        if (!std::isfinite(f)) {
            throw DivergenceError(t, "IHT diverged at iteration " + std::to_string(t) + ": non-finite objective");
        }
        record(f);
        trace.iters_run = t;
        SupportSet current = support_of(run.w);
        if (t >= 2 && current == prev1 && prev1 == prev2 && restricted_norm(grad, nz) <= params.grad_tol) {
            trace.converged = true;
            break;
        }
        prev2 = std::move(prev1);
        prev1 = std::move(current);
    }
    run.objective = f;
    return run;
}

bool use_gram_path(const Problem& problem, const IhtParams& params) {
    const std::size_t p = problem.p();
    return problem.loss_kind() == LossKind::Squared && p <= 2896 && p <= 2 * params.max_iters;
}

}  // namespace

SolveReport iht_solve(const Problem& problem, const IhtParams& params, const FeatureCurvature* curvature) {
    validate(params, problem.p());
    const bool squared = problem.loss_kind() == LossKind::Squared;

    FeatureCurvature local;
    const Matrix* gram = nullptr;
    if (squared && curvature && curvature->gram) {
        gram = curvature->gram.get();
    } else if (use_gram_path(problem, params) && !curvature) {
        local = prepare_curvature(problem.data().features(), true);
        gram = local.gram.get();
    }

    double eta = 0.0;
    if (params.step_size) {
        eta = *params.step_size;
    } else {
        double lambda = 0.0;
        if (curvature) {
            lambda = curvature->gram_lambda_max;
        } else if (local.gram) {
            lambda = local.gram_lambda_max;
        } else {
            lambda = gram_max_eigenvalue(problem.data().features());
        }
        eta = default_step_size(smoothness_from_gram_eigenvalue(problem.loss_kind(), problem.margin_scale(), lambda));
    }

    std::unique_ptr<Objective> objective;
    if (gram) {
        objective = std::make_unique<GramObjective>(problem, *gram, params.record_trace);
    } else {
        objective = std::make_unique<DirectObjective>(problem);
    }
    IhtRun run = run_iht(*objective, problem.p(), params, eta, params.record_trace);

    SolveReport report;
    report.objective = empirical_risk(problem, run.w);
    report.solution = std::move(run.w);
    report.support = std::move(run.kept);
    report.iters_run = run.trace.iters_run;
    report.converged = run.trace.converged;
    report.step_size = eta;
    report.min_margin = run.trace.min_margin();
    if (params.debias) {
        SupportSet nz = support_of(report.solution);
        report.debiased = nz.empty() ? DenseVector::Zero(report.solution.size()) : debias(problem, nz);
    }
    if (params.record_trace) report.trace = std::move(run.trace);
    return report;
}

namespace {

Matrix gather_columns(const RowMatrix& x, const SupportSet& support) {
    Matrix out(x.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t c = 0; c < support.size(); ++c) {
        out.col(static_cast<Eigen::Index>(c)) = x.col(static_cast<Eigen::Index>(support[c]));
    }
    return out;
}

DenseVector restricted_least_squares(const Matrix& xj, const DenseVector& y) {
    Eigen::BDCSVD<Matrix> svd(xj, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-12);
    return svd.solve(y);
}

struct LogisticState {
    double value = 0.0;
    DenseVector grad;
    DenseVector curvature;  // per-sample Hessian weights
};

LogisticState logistic_state(const Matrix& xj, const DenseVector& y, double c, const DenseVector& beta) {
    const DenseVector t = xj * beta;
    const double n = static_cast<double>(y.size());
    LogisticState s;
    DenseVector a(y.size());
    s.curvature.resize(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double z = c * y[i] * t[i];
        s.value += logistic_loss_of_margin(z);
        const double sig = sigmoid(-z);
        a[i] = -c * y[i] * sig;
        s.curvature[i] = c * c * sig * (1.0 - sig);
    }
    s.value /= n;
    s.grad = (xj.transpose() * a) / n;
    return s;
}

DenseVector restricted_logistic_newton(const Matrix& xj, const DenseVector& y, double c) {
    constexpr int kMaxNewton = 200;
    constexpr double kGradTol = 1e-10;
    const double n = static_cast<double>(y.size());
    DenseVector beta = DenseVector::Zero(xj.cols());
    LogisticState s = logistic_state(xj, y, c, beta);
    for (int it = 0; it < kMaxNewton; ++it) {
        const double gnorm = s.grad.norm();
        if (gnorm <= kGradTol) return beta;
        const Matrix hessian = (xj.transpose() * s.curvature.asDiagonal() * xj) / n;
        Eigen::LDLT<Matrix> ldlt(hessian);
        DenseVector dir = ldlt.solve(-s.grad);
        if (ldlt.info() != Eigen::Success || !dir.allFinite() || dir.dot(s.grad) >= 0.0) {
            dir = hessian.completeOrthogonalDecomposition().solve(-s.grad);
            if (!dir.allFinite() || dir.dot(s.grad) >= 0.0) dir = -s.grad;
        }
        const double slope = dir.dot(s.grad);
        double step = 1.0;
        LogisticState trial;
        while (true) {
            trial = logistic_state(xj, y, c, beta + step * dir);
            if (trial.value <= s.value + 1e-4 * step * slope + 1e-15 * std::abs(s.value)) break;
            step *= 0.5;
            if (step < 1e-12) break;
        }
        beta += step * dir;
        s = std::move(trial);
    }
    const double gnorm = s.grad.norm();
    if (gnorm <= kGradTol) return beta;
    throw ConvergenceError(gnorm, "debias: restricted Newton did not converge in 200 iterations (gradient norm " +
                                      std::to_string(gnorm) + ")");
}

}  // namespace

DenseVector debias(const Problem& problem, const SupportSet& support) {
    if (support.empty()) throw std::invalid_argument("debias: support must be nonempty");
    if (support.dimension() != problem.p()) throw std::invalid_argument("debias: support dimension mismatch");
    const Matrix xj = gather_columns(problem.data().features(), support);
    const DenseVector& y = problem.data().responses();
    const DenseVector beta = problem.loss_kind() == LossKind::Squared
                                 ? restricted_least_squares(xj, y)
                                 : restricted_logistic_newton(xj, y, problem.margin_scale());
    DenseVector w = DenseVector::Zero(static_cast<Eigen::Index>(problem.p()));
    for (std::size_t c = 0; c < support.size(); ++c) w[static_cast<Eigen::Index>(support[c])] = beta[static_cast<Eigen::Index>(c)];
    return w;
}

SolveReport brute_force_l0_erm(const Problem& problem, std::size_t k, std::size_t p_cap) {
    const std::size_t p = problem.p();
    if (k == 0) throw std::invalid_argument("brute_force_l0_erm: k must be at least 1");
    if (p > p_cap) {
        throw CapExceededError("brute_force_l0_erm: p = " + std::to_string(p) + " exceeds the enumeration cap of " +
                               std::to_string(p_cap));
    }
    k = std::min(k, p);
    const std::size_t count = binomial(p, k);
    if (count > 1'000'000) {
        throw CapExceededError("brute_force_l0_erm: C(" + std::to_string(p) + ", " + std::to_string(k) +
                               ") supports exceeds the cap of 1e6");
    }
    std::vector<std::size_t> combo(k);
    for (std::size_t i = 0; i < k; ++i) combo[i] = i;

    SolveReport best;
    best.objective = std::numeric_limits<double>::infinity();
    while (true) {
        SupportSet support(combo, p);
        DenseVector w = debias(problem, support);
        const double value = empirical_risk(problem, w);
        if (value < best.objective - 1e-12) {
            best.objective = value;
            best.solution = w;
            best.support = std::move(support);
        }
        // Next combination in lexicographic order.
        std::size_t i = k;
        while (i > 0 && combo[i - 1] == p - k + (i - 1)) --i;
        if (i == 0) break;
        ++combo[i - 1];
        for (std::size_t j = i; j < k; ++j) combo[j] = combo[j - 1] + 1;
    }
    best.debiased = best.solution;
    best.iters_run = count;
    best.converged = true;
    best.min_margin = ht_stability_margin(best.solution, k);
    return best;
}

IhtTrace population_iht_trajectory(const GroundTruth& truth, const IhtParams& params) {
    if (truth.model_kind() != ModelKind::Linear) {
        throw std::invalid_argument("population_iht_trajectory: requires a linear ground truth");
    }
    validate(params, truth.p());
    const double eta = params.step_size ? *params.step_size : default_step_size(truth.max_covariance_eigenvalue());
    PopulationObjective objective(truth);
    return run_iht(objective, truth.p(), params, eta, true).trace;
}

}  // namespace l0erm
