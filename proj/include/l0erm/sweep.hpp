#pragma once

#include "l0erm/config.hpp"
#include "l0erm/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace l0erm {

struct ResultRow {
    std::string experiment;
    std::size_t replicate = 0;
    std::size_t n = 0;
    std::size_t k = 0;
    double sigma_or_r = 0.0;
    std::uint64_t seed = 0;
    double empirical_risk = 0.0;
    double population_risk = 0.0;
    double generalization_gap = 0.0;
    std::optional<double> excess_risk;
    std::size_t iters_run = 0;
    std::size_t support_size = 0;
    double min_ht_margin = 0.0;
    double wall_time_ms = 0.0;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

inline constexpr const char* kResultsHeader =
    "experiment,replicate,n,k,sigma_or_r,seed,empirical_risk,population_risk,generalization_gap,"
    "excess_risk,iters_run,support_size,min_ht_margin,wall_time_ms";

/// Seeds for one replicate. Every n, k and sigma/r value of a replicate reads
/// the same data stream, so a dataset of size n is the first n rows of any
/// larger one and all curves are compared on common data.
struct CellSeeds {
    Seed truth;
    Seed data;
    Seed evaluation;
};
CellSeeds cell_seeds(std::uint64_t base, std::size_t replicate);

/// Runs every (n, sigma/r, k, replicate) point. Rows come back in grid-major,
/// replicate-minor order (n, then sigma/r, then k, then replicate) regardless
/// of config.threads.
std::vector<ResultRow> run_sweep(const ExperimentConfig& config);

struct SummaryRow {
    std::string experiment;
    std::size_t n = 0;
    std::size_t k = 0;
    double sigma_or_r = 0.0;
    std::size_t count = 0;
    double gap_mean = 0.0;
    double gap_std = 0.0;
    std::size_t excess_count = 0;
    double excess_mean = 0.0;
    double excess_std = 0.0;
};

/// Groups by (experiment, n, k, sigma_or_r) in first-appearance order; sample
/// standard deviations (zero for single-row groups).
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
std::vector<ResultRow> read_results_csv(std::istream& in);
std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);

void write_summary_csv(const std::vector<SummaryRow>& summary, const std::filesystem::path& path);

enum class PlotMetric { GeneralizationGap, ExcessRisk };

/// Standalone SVG: x = n, one mean line with a +/-1 std band per series,
/// dashed overlays drawn as given.
void emit_plot(const std::vector<SummaryRow>& summary, PlotMetric metric, const std::vector<BoundCurve>& overlays,
               const std::filesystem::path& path, const std::string& title = {});

/// Default overlay kind per experiment: white-box rate for white-box runs,
/// uniform rate for black-box runs, strong-signal rate for stability runs.
BoundKind default_overlay(ExperimentKind kind);

/// One overlay per series, with the free constant matched to the series mean
/// at its largest n.
std::vector<BoundCurve> fitted_overlays(const std::vector<SummaryRow>& summary, PlotMetric metric,
                                        const ExperimentConfig& config, BoundKind kind);

struct SweepOutputs {
    std::filesystem::path csv;
    std::filesystem::path summary;
    std::vector<std::filesystem::path> plots;
};

/// Runs the sweep and writes <name>.csv, <name>_summary.csv, <name>_gap.svg,
/// and <name>_excess.svg (when the experiment reports excess risk) into out_dir.
SweepOutputs run_and_emit(const ExperimentConfig& config, const std::filesystem::path& out_dir);

}  // namespace l0erm
