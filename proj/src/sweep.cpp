#include "l0erm/sweep.hpp"

#include "l0erm/datagen.hpp"
#include "l0erm/dataset_io.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

namespace l0erm {

CellSeeds cell_seeds(std::uint64_t base, std::size_t replicate) {
    const Seed root(base);
    const std::string rep_label = "rep:" + std::to_string(replicate);
    return CellSeeds{root.child("truth"), root.child("data").child(rep_label), root.child("eval").child(rep_label)};
}

namespace {

struct ExperimentTraits {
    ModelKind model;
    bool black_box;
};

ExperimentTraits traits_of(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::LinearWhiteBox: return {ModelKind::Linear, false};
        case ExperimentKind::LinearBlackBox: return {ModelKind::Linear, true};
        case ExperimentKind::LogisticWhiteBox: return {ModelKind::Logistic, false};
        case ExperimentKind::LogisticBlackBox: return {ModelKind::Logistic, true};
        case ExperimentKind::SignalStrength: return {ModelKind::Linear, false};
        case ExperimentKind::SparsityInvariance: return {ModelKind::Linear, true};
    }
    throw std::invalid_argument("unknown experiment kind");
}

SignalScheme scheme_for(const ExperimentConfig& cfg, double third_value) {
    switch (cfg.kind) {
        case ExperimentKind::LinearWhiteBox:
        case ExperimentKind::LogisticWhiteBox:
            return GaussianSparse{cfg.k_bar, cfg.nonzero_sigma};
        case ExperimentKind::SignalStrength:
            return ScaledFixed{cfg.k_bar, third_value};
        case ExperimentKind::LinearBlackBox:
        case ExperimentKind::LogisticBlackBox:
        case ExperimentKind::SparsityInvariance:
            return NearlySparse{cfg.k_bar, cfg.perturb_sigma, cfg.nonzero_sigma};
    }
    throw std::invalid_argument("unknown experiment kind");
}

ExcessMode excess_mode_for(ExperimentKind kind, std::size_t k) {
    switch (kind) {
        case ExperimentKind::LinearWhiteBox:
        case ExperimentKind::SignalStrength:
            return WhiteBoxLinearExcess{};
        case ExperimentKind::LinearBlackBox:
        case ExperimentKind::SparsityInvariance:
            return BlackBoxLinearExcess{k};
        case ExperimentKind::LogisticWhiteBox:
            return WhiteBoxMonteCarloExcess{};
        case ExperimentKind::LogisticBlackBox:
            return NoExcess{};
    }
    throw std::invalid_argument("unknown experiment kind");
}

struct KeyedRow {
    std::tuple<std::size_t, std::size_t, std::size_t, std::size_t> key;  // (n, third, k, replicate)
    ResultRow row;
};

std::vector<KeyedRow> run_cell(const ExperimentConfig& cfg, std::size_t n_index, std::size_t replicate) {
    using Clock = std::chrono::steady_clock;
    const auto traits = traits_of(cfg.kind);
    const bool squared = traits.model == ModelKind::Linear;
    const LossKind loss = squared ? LossKind::Squared : LossKind::Logistic;
    const std::size_t n = cfg.n_values()[n_index];
    const CellSeeds seeds = cell_seeds(cfg.seed, replicate);
    const PopulationMode population =
        squared ? PopulationMode{ClosedFormPopulation{}} : PopulationMode{MonteCarloPopulation{cfg.mc_samples}};
    const auto& third = cfg.third_grid();

    std::vector<KeyedRow> out;
    std::optional<FeatureCurvature> curvature;
    for (std::size_t v = 0; v < third.size(); ++v) {
        const double sigma = cfg.kind == ExperimentKind::SignalStrength ? cfg.sigma.front() : third[v];
        const GroundTruth truth = gen_ground_truth(cfg.p, scheme_for(cfg, third[v]), sigma, traits.model, seeds.truth,
                                                   IdentityCovariance{}, cfg.margin_scale);
        const Problem problem(loss, gen_dataset(truth, n, seeds.data), cfg.margin_scale);
        // Features depend only on the data stream, so one curvature serves every sigma/r.
        if (!curvature) curvature = prepare_curvature(problem.data().features(), squared && cfg.p <= 2896);

        for (std::size_t ki = 0; ki < cfg.k.size(); ++ki) {
            const auto start = Clock::now();
            IhtParams params;
            params.k = cfg.k[ki];
            params.step_size = cfg.step;
            params.max_iters = cfg.max_iters;
            params.grad_tol = cfg.grad_tol;
            params.debias = cfg.evaluate == EvaluatedIterate::Debiased;
            try {
                const SolveReport report = iht_solve(problem, params, &*curvature);
                const DenseVector& w = cfg.evaluate == EvaluatedIterate::Debiased ? *report.debiased : report.solution;
                const RiskReport risk =
                    risk_report(problem, w, truth, population, excess_mode_for(cfg.kind, params.k), seeds.evaluation);
                ResultRow row;
                row.experiment = to_string(cfg.kind);
                row.replicate = replicate;
                row.n = n;
                row.k = params.k;
                row.sigma_or_r = third[v];
                row.seed = seeds.data.key();
                row.empirical_risk = risk.empirical_risk;
                row.population_risk = risk.population_risk;
                row.generalization_gap = risk.generalization_gap;
                row.excess_risk = risk.excess_risk;
                row.iters_run = report.iters_run;
                row.support_size = count_nonzeros(w);
                row.min_ht_margin = report.min_margin;
                if (cfg.timing) {
                    row.wall_time_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
                }
                out.push_back({{n_index, v, ki, replicate}, std::move(row)});
            } catch (const std::exception& e) {
                std::ostringstream msg;
                msg << "sweep failed at n=" << n << ", k=" << params.k << ", sigma_or_r=" << format_double(third[v])
                    << ", replicate=" << replicate << ": " << e.what();
                throw std::runtime_error(msg.str());
            }
        }
    }
    return out;
}

}  // namespace

std::vector<ResultRow> run_sweep(const ExperimentConfig& config) {
    config.validate();
    const std::size_t cells = config.n_over_p.size() * config.replicates;
    std::vector<std::vector<KeyedRow>> results(cells);
    std::vector<std::exception_ptr> errors(cells);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t c = next++; c < cells; c = next++) {
            try {
                results[c] = run_cell(config, c / config.replicates, c % config.replicates);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        }
    };
    const std::size_t thread_count = std::min(config.threads, cells);
    if (thread_count <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    std::vector<KeyedRow> all;
    for (auto& cell : results) {
        for (auto& r : cell) all.push_back(std::move(r));
    }
    std::sort(all.begin(), all.end(), [](const KeyedRow& a, const KeyedRow& b) { return a.key < b.key; });
    std::vector<ResultRow> rows;
    rows.reserve(all.size());
    for (auto& r : all) rows.push_back(std::move(r.row));
    return rows;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("summarize: no rows");
    using Key = std::tuple<std::string, std::size_t, std::size_t, double>;
    std::map<Key, std::size_t> index;
    std::vector<SummaryRow> out;
    std::vector<std::vector<double>> gaps;
    std::vector<std::vector<double>> excesses;
    for (const auto& row : rows) {
        const Key key{row.experiment, row.n, row.k, row.sigma_or_r};
        auto [it, inserted] = index.try_emplace(key, out.size());
        if (inserted) {
            SummaryRow s;
            s.experiment = row.experiment;
            s.n = row.n;
            s.k = row.k;
            s.sigma_or_r = row.sigma_or_r;
            out.push_back(s);
            gaps.emplace_back();
            excesses.emplace_back();
        }
        gaps[it->second].push_back(row.generalization_gap);
        if (row.excess_risk) excesses[it->second].push_back(*row.excess_risk);
    }
    auto mean_std = [](const std::vector<double>& v) -> std::pair<double, double> {
        if (v.empty()) return {0.0, 0.0};
        // Shifted by the first value so constant groups give an exact mean and zero spread.
        double shift = 0.0;
        for (double x : v) shift += x - v.front();
        const double mean = v.front() + shift / static_cast<double>(v.size());
        if (v.size() < 2) return {mean, 0.0};
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
    };
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].count = gaps[i].size();
        std::tie(out[i].gap_mean, out[i].gap_std) = mean_std(gaps[i]);
        out[i].excess_count = excesses[i].size();
        std::tie(out[i].excess_mean, out[i].excess_std) = mean_std(excesses[i]);
    }
    return out;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << kResultsHeader << '\n';
    for (const auto& r : rows) {
        out << r.experiment << ',' << r.replicate << ',' << r.n << ',' << r.k << ',' << format_double(r.sigma_or_r)
            << ',' << r.seed << ',' << format_double(r.empirical_risk) << ',' << format_double(r.population_risk)
            << ',' << format_double(r.generalization_gap) << ','
            << (r.excess_risk ? format_double(*r.excess_risk) : std::string()) << ',' << r.iters_run << ','
            << r.support_size << ',' << format_double(r.min_ht_margin) << ',' << format_double(r.wall_time_ms) << '\n';
    }
}

void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_results_csv(out, rows);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("results CSV: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kResultsHeader) throw std::invalid_argument("results CSV: unexpected header");
    std::vector<ResultRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string item; std::getline(ss, item, ',');) f.push_back(item);
        if (!line.empty() && line.back() == ',') f.emplace_back();
        if (f.size() != 14) {
            throw std::invalid_argument("results CSV line " + std::to_string(line_no) + ": expected 14 fields");
        }
        auto count = [&](const std::string& s) { return static_cast<std::size_t>(std::stoull(s)); };
        ResultRow r;
        r.experiment = f[0];
        r.replicate = count(f[1]);
        r.n = count(f[2]);
        r.k = count(f[3]);
        r.sigma_or_r = parse_double(f[4]);
        r.seed = std::stoull(f[5]);
        r.empirical_risk = parse_double(f[6]);
        r.population_risk = parse_double(f[7]);
        r.generalization_gap = parse_double(f[8]);
        if (!f[9].empty()) r.excess_risk = parse_double(f[9]);
        r.iters_run = count(f[10]);
        r.support_size = count(f[11]);
        r.min_ht_margin = parse_double(f[12]);
        r.wall_time_ms = parse_double(f[13]);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_results_csv(in);
}

void write_summary_csv(const std::vector<SummaryRow>& summary, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "experiment,n,k,sigma_or_r,count,gap_mean,gap_std,excess_count,excess_mean,excess_std\n";
    for (const auto& s : summary) {
        out << s.experiment << ',' << s.n << ',' << s.k << ',' << format_double(s.sigma_or_r) << ',' << s.count << ','
            << format_double(s.gap_mean) << ',' << format_double(s.gap_std) << ',' << s.excess_count << ',';
        if (s.excess_count > 0) out << format_double(s.excess_mean) << ',' << format_double(s.excess_std);
        else out << ',';
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

BoundKind default_overlay(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::LinearWhiteBox:
        case ExperimentKind::LogisticWhiteBox:
            return BoundKind::WhiteBox;
        case ExperimentKind::LinearBlackBox:
        case ExperimentKind::LogisticBlackBox:
            return BoundKind::Uniform;
        case ExperimentKind::SignalStrength:
        case ExperimentKind::SparsityInvariance:
            return BoundKind::StrongSignal;
    }
    return BoundKind::WhiteBox;
}

std::vector<BoundCurve> fitted_overlays(const std::vector<SummaryRow>& summary, PlotMetric metric,
                                        const ExperimentConfig& config, BoundKind kind) {
    std::map<std::pair<std::size_t, double>, std::vector<const SummaryRow*>> series;
    for (const auto& s : summary) series[{s.k, s.sigma_or_r}].push_back(&s);
    std::vector<BoundCurve> curves;
    for (const auto& [key, points] : series) {
        std::vector<double> ns;
        const SummaryRow* last = nullptr;
        for (const auto* s : points) {
            ns.push_back(static_cast<double>(s->n));
            if (!last || s->n > last->n) last = s;
        }
        if (!last || last->n < 2) continue;
        const double target = metric == PlotMetric::GeneralizationGap ? last->gap_mean : last->excess_mean;
        if (!(target > 0.0)) continue;
        const double sigma = config.kind == ExperimentKind::SignalStrength ? config.sigma.front() : key.second;
        if (kind == BoundKind::WhiteBox && !(sigma > 0.0)) continue;
        const auto k = static_cast<double>(key.first);
        const auto p = static_cast<double>(config.p);
        const double unit = theory_bound(kind, k, p, static_cast<double>(last->n), sigma > 0.0 ? sigma : 1.0, 1.0, 1.0, 1.0);
        curves.push_back(bound_curve(kind, ns, k, p, sigma > 0.0 ? sigma : 1.0, 1.0, 1.0, target / unit));
    }
    return curves;
}

SweepOutputs run_and_emit(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const auto rows = run_sweep(config);
    SweepOutputs outputs;
    outputs.csv = out_dir / (config.name + ".csv");
    emit_csv(rows, outputs.csv);
    const auto summary = summarize(rows);
    outputs.summary = out_dir / (config.name + "_summary.csv");
    write_summary_csv(summary, outputs.summary);

    std::optional<BoundKind> overlay = default_overlay(config.kind);
    if (config.overlay) {
        if (*config.overlay == "none") overlay.reset();
        else overlay = parse_bound_kind(*config.overlay);
    }
    auto plot = [&](PlotMetric metric, const std::string& suffix, const std::string& label) {
        const auto curves = overlay ? fitted_overlays(summary, metric, config, *overlay) : std::vector<BoundCurve>{};
        const auto path = out_dir / (config.name + suffix);
        emit_plot(summary, metric, curves, path, config.name + ": " + label);
        outputs.plots.push_back(path);
    };
    plot(PlotMetric::GeneralizationGap, "_gap.svg", "generalization gap");
    const bool has_excess = std::any_of(summary.begin(), summary.end(), [](const SummaryRow& s) { return s.excess_count > 0; });
    if (has_excess) plot(PlotMetric::ExcessRisk, "_excess.svg", "excess risk");
    return outputs;
}

}  // namespace l0erm
