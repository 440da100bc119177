#include "l0erm/cli.hpp"

#include "l0erm/datagen.hpp"
#include "l0erm/dataset_io.hpp"
#include "l0erm/losses.hpp"
#include "l0erm/metrics.hpp"
#include "l0erm/report_io.hpp"
#include "l0erm/sweep.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace l0erm {

namespace {

struct GlobalOptions {
    std::uint64_t seed = 2021;
    std::optional<std::size_t> threads;
    std::string config;
    std::string out;
};

struct SyntheticOptions {
    std::size_t p = 100;
    std::size_t n = 200;
    std::size_t k_bar = 10;
    double sigma = 1.0;
    std::string model = "linear";
    std::string scheme = "gaussian";
    double r = 1.0;
    double perturb_sigma = 0.01;
    double nonzero_sigma = 1.0;
    double margin_scale = kDefaultMarginScale;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--p", p, "feature dimension");
        cmd->add_option("--n", n, "number of samples");
        cmd->add_option("--k-bar", k_bar, "nonzeros of the nominal model");
        cmd->add_option("--sigma", sigma, "noise level");
        cmd->add_option("--model", model, "linear | logistic")->check(CLI::IsMember({"linear", "logistic"}));
        cmd->add_option("--scheme", scheme, "gaussian | scaled | nearly")
            ->check(CLI::IsMember({"gaussian", "scaled", "nearly"}));
        cmd->add_option("--r", r, "signal strength (scaled scheme)");
        cmd->add_option("--perturb-sigma", perturb_sigma, "dense perturbation (nearly scheme)");
        cmd->add_option("--nonzero-sigma", nonzero_sigma, "std of the nonzeros");
        cmd->add_option("--margin-scale", margin_scale, "logistic margin factor");
    }

    GroundTruth truth(const Seed& seed) const {
        SignalScheme s;
        if (scheme == "gaussian") s = GaussianSparse{k_bar, nonzero_sigma};
        else if (scheme == "scaled") s = ScaledFixed{k_bar, r};
        else s = NearlySparse{k_bar, perturb_sigma, nonzero_sigma};
        const ModelKind kind = model == "linear" ? ModelKind::Linear : ModelKind::Logistic;
        return gen_ground_truth(p, s, sigma, kind, seed, IdentityCovariance{}, margin_scale);
    }
};

std::optional<double> parse_step(const std::string& text) {
    if (text == "auto") return std::nullopt;
    const double v = parse_double(text);
    if (!(v > 0.0)) throw std::invalid_argument("step must be positive or 'auto'");
    return v;
}

LossKind parse_loss(const std::string& text) { return text == "logistic" ? LossKind::Logistic : LossKind::Squared; }

void write_json_output(const nlohmann::json& doc, const GlobalOptions& global, const std::string& file,
                       std::ostream& out) {
    out << doc.dump(2) << '\n';
    if (!global.out.empty()) {
        std::filesystem::create_directories(global.out);
        const auto path = std::filesystem::path(global.out) / file;
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
        f << doc.dump(2) << '\n';
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sparsity-constrained ERM with iterative hard thresholding"};
    app.name("l0erm");
    app.fallthrough();
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--seed", global.seed, "base random seed");
    app.add_option("--threads", global.threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
    app.add_option("--config", global.config, "experiment config file");
    app.add_option("--out", global.out, "output directory");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset CSV");
    SyntheticOptions gen_opts;
    gen_opts.add_to(gen);
    std::string gen_output;
    gen->add_option("--output", gen_output, "dataset path (default <out>/dataset.csv)");

    // solve
    auto* solve = app.add_subcommand("solve", "run IHT on a dataset CSV");
    std::string data_path;
    std::string loss_name = "squared";
    std::size_t k = 0;
    std::string step_text = "auto";
    std::size_t max_iters = 1000;
    double grad_tol = 1e-8;
    double margin_scale = kDefaultMarginScale;
    bool no_debias = false;
    solve->add_option("--data", data_path, "dataset CSV")->required();
    solve->add_option("--loss", loss_name, "squared | logistic")->check(CLI::IsMember({"squared", "logistic"}));
    solve->add_option("--k", k, "sparsity level")->required()->check(CLI::PositiveNumber);
    solve->add_option("--step", step_text, "step size or 'auto' for 2/(3L)");
    solve->add_option("--max-iters", max_iters, "iteration cap");
    solve->add_option("--grad-tol", grad_tol, "restricted gradient tolerance");
    solve->add_option("--margin-scale", margin_scale, "logistic margin factor");
    solve->add_flag("--no-debias", no_debias, "skip the support-restricted refit");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "exact l0-ERM by support enumeration (small p)");
    SyntheticOptions oracle_opts;
    oracle_opts.p = 8;
    oracle_opts.n = 32;
    oracle_opts.k_bar = 2;
    oracle_opts.add_to(oracle);
    std::string oracle_data;
    std::size_t oracle_k = 2;
    std::size_t p_cap = 20;
    oracle->add_option("--data", oracle_data, "dataset CSV (otherwise a synthetic instance is generated)");
    oracle->add_option("--k", oracle_k, "sparsity level")->check(CLI::PositiveNumber);
    oracle->add_option("--p-cap", p_cap, "largest p accepted");
    oracle->add_option("--loss", loss_name, "squared | logistic")->check(CLI::IsMember({"squared", "logistic"}));

    // sweep
    auto* sweep = app.add_subcommand("sweep", "run an experiment config and write CSV + plots");

    // stability
    auto* stability = app.add_subcommand("stability", "replace-one-sample support stability experiment");
    SyntheticOptions stab_opts;
    stab_opts.p = 1000;
    stab_opts.n = 1000;
    stab_opts.k_bar = 100;
    stab_opts.scheme = "scaled";
    stab_opts.r = 10.0;
    stab_opts.add_to(stability);
    std::size_t stab_k = 0;
    std::size_t trials = 50;
    std::size_t eval_samples = 10000;
    stability->add_option("--k", stab_k, "sparsity level (default k_bar)");
    stability->add_option("--trials", trials, "replacement trials")->check(CLI::PositiveNumber);
    stability->add_option("--eval-samples", eval_samples, "evaluation samples for empirical gamma");
    std::string stab_step = "0.5";
    stability->add_option("--step", stab_step, "step size or 'auto'");
    stability->add_option("--max-iters", max_iters, "iteration cap");
    stability->add_option("--grad-tol", grad_tol, "restricted gradient tolerance");

    // bounds
    auto* bounds = app.add_subcommand("bounds", "print theoretical rate values");
    std::string bound_kind;
    double b_k = 100, b_p = 1000, b_sigma = 1, b_L = 1, b_mu = 1, b_const = 1;
    std::vector<double> b_n{500};
    bounds->add_option("--kind", bound_kind, "whitebox | uniform | strongsignal (default: all)");
    bounds->add_option("--k", b_k, "sparsity level");
    bounds->add_option("--p", b_p, "dimension");
    bounds->add_option("--n", b_n, "sample sizes")->expected(1, -1);
    bounds->add_option("--sigma", b_sigma, "noise level");
    bounds->add_option("--L", b_L, "smoothness constant");
    bounds->add_option("--mu", b_mu, "restricted strong convexity constant");
    bounds->add_option("--constant", b_const, "multiplicative constant");

    // certify
    auto* certify = app.add_subcommand("certify", "IHT stability margin of the population risk (linear model)");
    SyntheticOptions cert_opts;
    cert_opts.p = 1000;
    cert_opts.k_bar = 100;
    cert_opts.scheme = "scaled";
    cert_opts.add_to(certify);
    std::size_t cert_k = 0;
    double eta = 0.5;
    std::size_t horizon = 50;
    double c_G = 1, c_L = 1, c_mu = 1, c_delta = 0.05;
    certify->add_option("--k", cert_k, "sparsity level (default k_bar)");
    certify->add_option("--eta", eta, "step size")->check(CLI::PositiveNumber);
    certify->add_option("--T", horizon, "iterations")->check(CLI::PositiveNumber);
    certify->add_option("--G", c_G, "Lipschitz constant for the sample-size threshold");
    certify->add_option("--L", c_L, "smoothness constant for the sample-size threshold");
    certify->add_option("--mu", c_mu, "strong convexity constant for the sample-size threshold");
    certify->add_option("--delta", c_delta, "failure probability");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        err << app.help();
        return 1;
    }

    try {
        const Seed root(global.seed);
        if (gen->parsed()) {
            const CellSeeds seeds = cell_seeds(global.seed, 0);
            const GroundTruth truth = gen_opts.truth(seeds.truth);
            const Dataset data = gen_dataset(truth, gen_opts.n, seeds.data);
            std::filesystem::path path = gen_output;
            if (path.empty()) path = std::filesystem::path(global.out.empty() ? "." : global.out) / "dataset.csv";
            if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
            write_dataset_csv(path, data);
            out << "wrote " << data.n() << " x " << data.p() << " dataset to " << path.string() << '\n';
            out << "nominal support: ";
            for (auto i : support_of(truth.w_bar())) out << i << ' ';
            out << "\nseed: " << seeds.data.describe() << " (" << Rng::kEngine << ", " << Rng::kGaussianTransform << ")\n";
        } else if (solve->parsed()) {
            const Problem problem(parse_loss(loss_name), read_dataset_csv(data_path), margin_scale);
            IhtParams params;
            params.k = k;
            params.step_size = parse_step(step_text);
            params.max_iters = max_iters;
            params.grad_tol = grad_tol;
            params.debias = !no_debias;
            write_json_output(to_json(iht_solve(problem, params)), global, "solve.json", out);
        } else if (oracle->parsed()) {
            LossKind loss = parse_loss(loss_name);
            auto load = [&]() -> Dataset {
                if (!oracle_data.empty()) return read_dataset_csv(oracle_data);
                if (oracle_opts.p > p_cap) {
                    throw CapExceededError("oracle: p = " + std::to_string(oracle_opts.p) +
                                           " exceeds the enumeration cap of " + std::to_string(p_cap));
                }
                const CellSeeds seeds = cell_seeds(global.seed, 0);
                const GroundTruth truth = oracle_opts.truth(seeds.truth);
                loss = truth.model_kind() == ModelKind::Linear ? LossKind::Squared : LossKind::Logistic;
                return gen_dataset(truth, oracle_opts.n, seeds.data);
            };
            Dataset data = load();
            const Problem problem(loss, std::move(data), oracle_opts.margin_scale);
            write_json_output(to_json(brute_force_l0_erm(problem, oracle_k, p_cap)), global, "oracle.json", out);
        } else if (sweep->parsed()) {
            if (global.config.empty()) {
                err << "sweep requires --config <path>\n";
                return 1;
            }
            ExperimentConfig cfg = load_config(global.config);
            if (app.count("--seed")) cfg.seed = global.seed;
            if (global.threads) cfg.threads = *global.threads;
            const auto outputs = run_and_emit(cfg, global.out.empty() ? "results" : global.out);
            out << "wrote " << outputs.csv.string() << '\n' << "wrote " << outputs.summary.string() << '\n';
            for (const auto& p : outputs.plots) out << "wrote " << p.string() << '\n';
        } else if (stability->parsed()) {
            const GroundTruth truth = stab_opts.truth(root.child("truth"));
            IhtParams params;
            params.k = stab_k ? stab_k : stab_opts.k_bar;
            params.step_size = parse_step(stab_step);
            params.max_iters = max_iters;
            params.grad_tol = grad_tol;
            StabilityOptions options;
            options.eval_samples = eval_samples;
            const auto report = support_stability_experiment(truth, stab_opts.n, params, trials, root.child("stability"), options);
            write_json_output(to_json(report), global, "stability.json", out);
        } else if (bounds->parsed()) {
            std::vector<BoundKind> kinds;
            if (bound_kind.empty()) kinds = {BoundKind::WhiteBox, BoundKind::Uniform, BoundKind::StrongSignal};
            else kinds = {parse_bound_kind(bound_kind)};
            out << "kind\tn\tvalue\n";
            for (auto kind : kinds) {
                for (double n : b_n) {
                    out << to_string(kind) << '\t' << format_double(n) << '\t'
                        << format_double(theory_bound(kind, b_k, b_p, n, b_sigma, b_L, b_mu, b_const)) << '\n';
                }
            }
        } else if (certify->parsed()) {
            const GroundTruth truth = cert_opts.truth(root.child("truth"));
            IhtParams params;
            params.k = cert_k ? cert_k : cert_opts.k_bar;
            params.step_size = eta;
            params.max_iters = horizon;
            params.grad_tol = 0.0;
            const auto cert = iht_stability_certificate(truth, params);
            nlohmann::json doc;
            doc["epsilon_k"] = cert.epsilon_k;
            doc["w_bar_min"] = count_nonzeros(truth.w_bar()) ? smallest_nonzero_magnitude(truth.w_bar()) : 0.0;
            const double required = cert.required_sample_size(c_G, c_L, c_mu, static_cast<double>(truth.p()),
                                                               static_cast<double>(horizon), c_delta);
            doc["required_n"] = std::isfinite(required) ? nlohmann::json(required) : nlohmann::json("inf");
            write_json_output(doc, global, "certify.json", out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace l0erm
