#pragma once

#include "l0erm/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace l0erm {

enum class ExperimentKind {
    LinearWhiteBox,
    LinearBlackBox,
    LogisticWhiteBox,
    LogisticBlackBox,
    SignalStrength,
    SparsityInvariance,
};

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& text);

enum class EvaluatedIterate { Iht, Debiased };

/// One experiment sweep. Flat key-value file format, one `key = value` per
/// line, `#` starts a comment. Grids are `[a, b, c]`, `linspace(lo, hi, count)`
/// or a single scalar. Keys:
///
///   experiment     LinearWhiteBox | LinearBlackBox | LogisticWhiteBox |
///                  LogisticBlackBox | SignalStrength | SparsityInvariance
///   name           label used for output file names (default: config file stem)
///   p              feature dimension
///   n_over_p       grid of sample-size ratios; n = round(n_over_p * p)
///   k              grid of sparsity levels
///   sigma          noise grid (a single value for SignalStrength)
///   r              signal-strength grid (SignalStrength only)
///   k_bar          nonzeros of the nominal model
///   nonzero_sigma  std of the nominal nonzeros
///   perturb_sigma  std of the dense perturbation (black-box and invariance runs)
///   replicates     datasets per grid point
///   seed           base seed
///   step           `auto` (2/(3L)) or a positive number
///   max_iters, grad_tol
///   mc_samples     Monte Carlo samples for logistic population risk
///   margin_scale   logistic margin factor
///   evaluate       iht | debiased
///   overlay        whitebox | uniform | strongsignal | none
///   threads        worker threads
///   timing         true | false (false writes wall_time_ms = 0 so output is reproducible)
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::LinearWhiteBox;
    std::string name = "sweep";
    std::size_t p = 1000;
    std::vector<double> n_over_p;
    std::vector<std::size_t> k;
    std::vector<double> sigma{1.0};
    std::vector<double> r{1.0};
    std::size_t k_bar = 50;
    double nonzero_sigma = 1.0;
    double perturb_sigma = 0.01;
    std::size_t replicates = 10;
    std::uint64_t seed = 2021;
    std::optional<double> step;
    std::size_t max_iters = 1000;
    double grad_tol = 1e-6;
    std::size_t mc_samples = 100000;
    double margin_scale = 2.0;
    EvaluatedIterate evaluate = EvaluatedIterate::Iht;
    std::optional<std::string> overlay;  // nullopt: default for the experiment kind
    std::size_t threads = 1;
    bool timing = false;

    /// Values of the third grid axis: r for SignalStrength, sigma otherwise.
    const std::vector<double>& third_grid() const;
    std::vector<std::size_t> n_values() const;
    /// Throws std::invalid_argument describing the first violated constraint.
    void validate() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string format_config(const ExperimentConfig& config);

}  // namespace l0erm
