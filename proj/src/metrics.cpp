#include "l0erm/metrics.hpp"

#include "l0erm/datagen.hpp"
#include "l0erm/losses.hpp"
#include "l0erm/thresholding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace l0erm {

namespace {

void require_linear(const GroundTruth& truth, const char* what) {
    if (truth.model_kind() != ModelKind::Linear) {
        throw std::invalid_argument(std::string(what) + " requires a linear ground truth");
    }
}

LossKind loss_for(const GroundTruth& truth) {
    return truth.model_kind() == ModelKind::Linear ? LossKind::Squared : LossKind::Logistic;
}

}  // namespace

RiskReport risk_report(const Problem& problem, const DenseVector& w, const GroundTruth& truth,
                       const PopulationMode& population_mode, const ExcessMode& excess_mode, const Seed& seed) {
    if (truth.p() != problem.p()) throw std::invalid_argument("risk_report: truth and problem dimensions differ");
    RiskReport report;
    report.empirical_risk = empirical_risk(problem, w);
    const Seed population_seed = seed.child("population");

    const auto* mc = std::get_if<MonteCarloPopulation>(&population_mode);
    if (mc) {
        const McEstimate est = population_risk_monte_carlo(problem.loss_kind(), w, truth, mc->m, population_seed);
        report.population_risk = est.mean;
        report.population_std_error = est.std_error;
    } else {
        require_linear(truth, "closed-form population risk");
        report.population_risk = population_risk_linear(w, truth);
    }
    report.generalization_gap = report.population_risk - report.empirical_risk;

    std::visit(
        [&](const auto& mode) {
            using T = std::decay_t<decltype(mode)>;
            if constexpr (std::is_same_v<T, WhiteBoxLinearExcess>) {
                require_linear(truth, "white-box linear excess risk");
                report.excess_risk = 0.5 * truth.quadratic_form(w - truth.w_bar());
            } else if constexpr (std::is_same_v<T, BlackBoxLinearExcess>) {
                require_linear(truth, "black-box linear excess risk");
                const DenseVector best = hard_threshold(truth.w_bar(), mode.k).vector;
                report.excess_risk =
                    0.5 * (truth.quadratic_form(w - truth.w_bar()) - truth.quadratic_form(best - truth.w_bar()));
            } else if constexpr (std::is_same_v<T, WhiteBoxMonteCarloExcess>) {
                if (!mc) throw std::invalid_argument("Monte Carlo excess risk requires Monte Carlo population mode");
                const McEstimate diff =
                    monte_carlo_risk_difference(problem.loss_kind(), w, truth.w_bar(), truth, mc->m, population_seed);
                report.excess_risk = diff.mean;
                report.excess_std_error = diff.std_error;
            }
        },
        excess_mode);
    return report;
}

std::string to_string(BoundKind kind) {
    switch (kind) {
        case BoundKind::WhiteBox: return "whitebox";
        case BoundKind::Uniform: return "uniform";
        case BoundKind::StrongSignal: return "strongsignal";
    }
    return "?";
}

BoundKind parse_bound_kind(const std::string& text) {
    std::string t;
    for (char c : text) {
        if (c != '_' && c != '-') t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (t == "whitebox") return BoundKind::WhiteBox;
    if (t == "uniform") return BoundKind::Uniform;
    if (t == "strongsignal") return BoundKind::StrongSignal;
    throw std::invalid_argument("unknown bound kind '" + text + "' (whitebox, uniform, strongsignal)");
}

double theory_bound(BoundKind kind, double k, double p, double n, double sigma, double L, double mu, double constant) {
    for (double v : {k, p, n, sigma, L, mu, constant}) {
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("theory_bound: parameters must be positive");
    }
    if (n < 2.0) throw std::invalid_argument("theory_bound: n must be at least 2");
    switch (kind) {
        case BoundKind::WhiteBox: return constant * (L / (mu * mu)) * k * sigma * sigma * std::log(p) / n;
        case BoundKind::Uniform: return constant * std::sqrt(k * std::log(p) / n);
        case BoundKind::StrongSignal: return constant * std::log(n) / std::sqrt(n);
    }
    throw std::invalid_argument("theory_bound: unknown kind");
}

BoundCurve bound_curve(BoundKind kind, const std::vector<double>& n_values, double k, double p, double sigma,
                       double L, double mu, double constant) {
    BoundCurve curve;
    curve.kind = kind;
    for (double n : n_values) curve.points.emplace_back(n, theory_bound(kind, k, p, n, sigma, L, mu, constant));
    return curve;
}

double restricted_min_eigenvalue(const RowMatrix& features, const SupportSet& support) {
    if (support.empty()) throw std::invalid_argument("restricted_min_eigenvalue: empty support");
    Matrix xj(features.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t c = 0; c < support.size(); ++c) {
        xj.col(static_cast<Eigen::Index>(c)) = features.col(static_cast<Eigen::Index>(support[c]));
    }
    const Matrix block = (xj.transpose() * xj) / static_cast<double>(features.rows());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(block, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

RestrictedEigenvalueEstimate restricted_eigenvalue_estimate(const RowMatrix& features, std::size_t s,
                                                            std::size_t trials, const Seed& seed) {
    const auto p = static_cast<std::size_t>(features.cols());
    if (s == 0 || s > p) {
        throw std::invalid_argument("restricted_eigenvalue_estimate: need 1 <= s <= p (s = " + std::to_string(s) + ")");
    }
    if (trials == 0) throw std::invalid_argument("restricted_eigenvalue_estimate: trials must be positive");

    std::optional<Matrix> gram;
    if (p <= 4096) gram = (features.transpose() * features) / static_cast<double>(features.rows());

    RestrictedEigenvalueEstimate best;
    best.mu_hat = std::numeric_limits<double>::infinity();
    auto consider = [&](std::vector<std::size_t> idx) {
        SupportSet support(std::move(idx), p);
        double value;
        if (gram) {
            Matrix block(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
            for (std::size_t a = 0; a < s; ++a) {
                for (std::size_t b = 0; b < s; ++b) {
                    block(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                        (*gram)(static_cast<Eigen::Index>(support[a]), static_cast<Eigen::Index>(support[b]));
                }
            }
            Eigen::SelfAdjointEigenSolver<Matrix> eig(block, Eigen::EigenvaluesOnly);
            value = eig.eigenvalues().minCoeff();
        } else {
            value = restricted_min_eigenvalue(features, support);
        }
        if (value < best.mu_hat) {
            best.mu_hat = value;
            best.support_of_min = std::move(support);
        }
    };

    if (binomial(p, s) <= trials) {
        std::vector<std::size_t> combo(s);
        std::iota(combo.begin(), combo.end(), std::size_t{0});
        while (true) {
            consider(combo);
            std::size_t i = s;
            while (i > 0 && combo[i - 1] == p - s + (i - 1)) --i;
            if (i == 0) break;
            ++combo[i - 1];
            for (std::size_t j = i; j < s; ++j) combo[j] = combo[j - 1] + 1;
        }
        return best;
    }

    Rng rng(seed);
    std::vector<std::size_t> order(p);
    for (std::size_t t = 0; t < trials; ++t) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = 0; i < s; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.uniform_index(p - i));
            std::swap(order[i], order[j]);
        }
        consider(std::vector<std::size_t>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s)));
    }
    return best;
}

ConcentrationResult gradient_concentration_check(const GroundTruth& truth, std::size_t n, std::size_t reps,
                                                 double delta, const Seed& seed) {
    require_linear(truth, "gradient_concentration_check");
    if (reps < 20) throw std::invalid_argument("gradient_concentration_check: reps must be at least 20");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("gradient_concentration_check: delta must be in (0, 1)");
    std::vector<double> norms;
    norms.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        const Dataset data = gen_linear_dataset(truth, n, seed.child("rep:" + std::to_string(r)));
        const DenseVector residual = data.features() * truth.w_bar() - data.responses();
        const DenseVector grad = (data.features().transpose() * residual) / static_cast<double>(n);
        norms.push_back(grad.cwiseAbs().maxCoeff());
    }
    std::sort(norms.begin(), norms.end());
    const auto rank = static_cast<std::size_t>(std::ceil((1.0 - delta) * static_cast<double>(reps)));
    ConcentrationResult out;
    out.empirical_quantile = norms[std::clamp<std::size_t>(rank, 1, reps) - 1];
    out.bound = truth.noise_sigma() *
                std::sqrt(2.0 * std::log(static_cast<double>(truth.p()) / delta) / static_cast<double>(n));
    out.pass = out.empirical_quantile <= out.bound;
    return out;
}

StabilityReport support_stability_experiment(const GroundTruth& truth, std::size_t n, const IhtParams& params,
                                             std::size_t trials, const Seed& seed, const StabilityOptions& options) {
    if (trials == 0) throw std::invalid_argument("support_stability_experiment: trials must be positive");
    if (options.eval_samples == 0) throw std::invalid_argument("support_stability_experiment: eval_samples must be positive");
    const LossKind kind = loss_for(truth);
    const double c = truth.margin_scale();
    IhtParams solve_params = params;
    solve_params.debias = true;

    const Dataset eval = gen_dataset(truth, options.eval_samples, seed.child("eval"));
    auto eval_losses = [&](const DenseVector& w) {
        const DenseVector pred = eval.features() * w;
        const auto& y = eval.responses();
        DenseVector out(pred.size());
        for (Eigen::Index i = 0; i < pred.size(); ++i) {
            if (kind == LossKind::Squared) {
                const double r = y[i] - pred[i];
                out[i] = 0.5 * r * r;
            } else {
                out[i] = logistic_loss_of_margin(c * y[i] * pred[i]);
            }
        }
        return out;
    };

    StabilityReport report;
    report.n_trials = trials;
    std::size_t agreements = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const Seed trial = seed.child("trial:" + std::to_string(t));
        try {
            const Dataset s = gen_dataset(truth, n, trial.child("S"));
            Dataset s_prime = s;
            if (!options.replace_with_self) {
                Rng index_rng(trial.child("index"));
                const auto idx = static_cast<std::size_t>(index_rng.uniform_index(n));
                RowMatrix x(1, static_cast<Eigen::Index>(truth.p()));
                DenseVector y(1);
                Rng sample_rng(trial.child("replacement"));
                sample_rows(truth, sample_rng, x, y);
                s_prime = s.with_sample_replaced(idx, x.row(0).transpose(), y[0]);
            }
            const SolveReport a = iht_solve(Problem(kind, s, c), solve_params);
            const SolveReport b = iht_solve(Problem(kind, s_prime, c), solve_params);
            if (a.support == b.support) ++agreements;
            const DenseVector diff = eval_losses(*a.debiased) - eval_losses(*b.debiased);
            report.max_loss_discrepancy = std::max(report.max_loss_discrepancy, diff.cwiseAbs().maxCoeff());
            report.ht_margins.push_back(std::min(a.min_margin, b.min_margin));
        } catch (const std::exception& e) {
            throw std::runtime_error("stability trial " + std::to_string(t) + ": " + e.what());
        }
    }
    report.support_agreement_rate = static_cast<double>(agreements) / static_cast<double>(trials);
    return report;
}

double IhtStabilityCertificate::required_sample_size(double G, double L, double mu, double p, double T,
                                                     double delta) const {
    if (!(L > 0.0) || !(mu > 0.0) || !(p > 0.0) || !(T > 0.0) || !(delta > 0.0 && delta < 1.0) || !(G >= 0.0)) {
        throw std::invalid_argument("required_sample_size: invalid constants");
    }
    if (epsilon_k <= 0.0) return std::numeric_limits<double>::infinity();
    const double num = 2.0 * G * G * (L + mu) * (L + mu) * std::log(p * T / delta);
    return num / (L * L * mu * mu * epsilon_k * epsilon_k);
}

IhtStabilityCertificate iht_stability_certificate(const GroundTruth& truth, const IhtParams& params) {
    require_linear(truth, "iht_stability_certificate");
    const IhtTrace trace = population_iht_trajectory(truth, params);
    IhtStabilityCertificate cert;
    cert.epsilon_k = trace.min_margin();
    return cert;
}

}  // namespace l0erm
