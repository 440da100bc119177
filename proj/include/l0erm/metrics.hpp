#pragma once

#include "l0erm/core.hpp"
#include "l0erm/ground_truth.hpp"
#include "l0erm/rng.hpp"
#include "l0erm/solver.hpp"

#include <optional>
#include <variant>

namespace l0erm {

struct RiskReport {
    double empirical_risk = 0.0;
    double population_risk = 0.0;
    /// Standard error of population_risk; zero for closed-form values.
    double population_std_error = 0.0;
    /// population_risk - empirical_risk.
    double generalization_gap = 0.0;
    /// nullopt when the excess risk is not computable for the chosen mode.
    std::optional<double> excess_risk;
    double excess_std_error = 0.0;
};

struct ClosedFormPopulation {};
struct MonteCarloPopulation {
    std::size_t m = 100000;
};
using PopulationMode = std::variant<ClosedFormPopulation, MonteCarloPopulation>;

/// 1/2 (w - w_bar)' Sigma (w - w_bar).
struct WhiteBoxLinearExcess {};
/// 1/2 (|w - w_bar|_Sigma^2 - |H_k(w_bar) - w_bar|_Sigma^2).
struct BlackBoxLinearExcess {
    std::size_t k = 1;
};
/// Monte Carlo estimate of F(w) - F(w_bar) on the population sample set.
struct WhiteBoxMonteCarloExcess {};
struct NoExcess {};
using ExcessMode = std::variant<WhiteBoxLinearExcess, BlackBoxLinearExcess, WhiteBoxMonteCarloExcess, NoExcess>;

/// Throws std::invalid_argument when a mode does not fit truth.model_kind():
/// closed-form population and *LinearExcess need a linear truth; the Monte Carlo
/// excess needs Monte Carlo population mode.
RiskReport risk_report(const Problem& problem, const DenseVector& w, const GroundTruth& truth,
                       const PopulationMode& population_mode, const ExcessMode& excess_mode, const Seed& seed);

enum class BoundKind { WhiteBox, Uniform, StrongSignal };

std::string to_string(BoundKind kind);
BoundKind parse_bound_kind(const std::string& text);

/// Rate curves with a free multiplicative constant:
///   WhiteBox      constant * (L / mu^2) * k * sigma^2 * log(p) / n
///   Uniform       constant * sqrt(k * log(p) / n)
///   StrongSignal  constant * log(n) / sqrt(n)
double theory_bound(BoundKind kind, double k, double p, double n, double sigma, double L, double mu, double constant);

struct BoundCurve {
    BoundKind kind = BoundKind::WhiteBox;
    std::vector<std::pair<double, double>> points;  // (n, value)
};

BoundCurve bound_curve(BoundKind kind, const std::vector<double>& n_values, double k, double p, double sigma,
                       double L, double mu, double constant);

struct RestrictedEigenvalueEstimate {
    double mu_hat = 0.0;
    SupportSet support_of_min;
};

/// Smallest eigenvalue of X_J' X_J / n.
double restricted_min_eigenvalue(const RowMatrix& features, const SupportSet& support);

/// Minimum of restricted_min_eigenvalue over `trials` random size-s supports.
/// When C(p, s) <= trials every support is visited once in lexicographic order
/// instead. Sampling can only over-estimate the true restricted eigenvalue.
RestrictedEigenvalueEstimate restricted_eigenvalue_estimate(const RowMatrix& features, std::size_t s,
                                                            std::size_t trials, const Seed& seed);

struct ConcentrationResult {
    double empirical_quantile = 0.0;
    double bound = 0.0;
    bool pass = false;
};

/// (1 - delta) empirical quantile of |grad F_S(w_bar)|_inf over `reps` datasets
/// against sigma * sqrt(2 log(p / delta) / n).
ConcentrationResult gradient_concentration_check(const GroundTruth& truth, std::size_t n, std::size_t reps,
                                                 double delta, const Seed& seed);

struct StabilityReport {
    double support_agreement_rate = 0.0;
    /// Empirical gamma: max over trials and evaluation samples of |loss(w_S) - loss(w_S')|.
    double max_loss_discrepancy = 0.0;
    /// Per trial, the smaller of the two runs' minimum hard-thresholding margins.
    std::vector<double> ht_margins;
    std::size_t n_trials = 0;
};

struct StabilityOptions {
    std::size_t eval_samples = 10000;
    /// Replace the chosen sample by itself (S' = S).
    bool replace_with_self = false;
};

/// Replace-one-sample experiment: for each trial draw S, swap one uniformly
/// chosen sample for a fresh draw, solve both with IHT + debias and compare.
StabilityReport support_stability_experiment(const GroundTruth& truth, std::size_t n, const IhtParams& params,
                                             std::size_t trials, const Seed& seed,
                                             const StabilityOptions& options = {});

struct IhtStabilityCertificate {
    double epsilon_k = 0.0;
    /// 2 G^2 (L + mu)^2 log(p T / delta) / (L^2 mu^2 eps^2); +infinity when eps = 0.
    double required_sample_size(double G, double L, double mu, double p, double T, double delta) const;
};

/// epsilon_k = min over t of the pre-threshold margins of the population IHT run.
IhtStabilityCertificate iht_stability_certificate(const GroundTruth& truth, const IhtParams& params);

}  // namespace l0erm
