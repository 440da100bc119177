#include "l0erm/config.hpp"

#include "l0erm/dataset_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace l0erm {

namespace {

constexpr std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::LinearWhiteBox, "LinearWhiteBox"},
    {ExperimentKind::LinearBlackBox, "LinearBlackBox"},
    {ExperimentKind::LogisticWhiteBox, "LogisticWhiteBox"},
    {ExperimentKind::LogisticBlackBox, "LogisticBlackBox"},
    {ExperimentKind::SignalStrength, "SignalStrength"},
    {ExperimentKind::SparsityInvariance, "SparsityInvariance"},
};

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& body) {
    std::vector<std::string> items;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

std::vector<double> parse_real_grid(const std::string& key, const std::string& value) {
    std::vector<double> out;
    if (value.rfind("linspace(", 0) == 0 && value.back() == ')') {
        const auto args = split_list(value.substr(9, value.size() - 10));
        if (args.size() != 3) throw std::invalid_argument(key + ": linspace takes (lo, hi, count)");
        const double lo = parse_double(args[0]);
        const double hi = parse_double(args[1]);
        const double count = parse_double(args[2]);
        if (count < 1 || count != std::floor(count)) throw std::invalid_argument(key + ": linspace count must be a positive integer");
        const auto m = static_cast<std::size_t>(count);
        for (std::size_t i = 0; i < m; ++i) {
            out.push_back(m == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m - 1));
        }
        return out;
    }
    if (value.front() == '[') {
        if (value.back() != ']') throw std::invalid_argument(key + ": unterminated list");
        for (const auto& item : split_list(value.substr(1, value.size() - 2))) out.push_back(parse_double(item));
    } else {
        out.push_back(parse_double(value));
    }
    if (out.empty()) throw std::invalid_argument(key + ": empty grid");
    return out;
}

std::size_t parse_count(const std::string& key, const std::string& value) {
    const double v = parse_double(value);
    if (v < 0 || v != std::floor(v) || v > 1e15) throw std::invalid_argument(key + ": expected a nonnegative integer, got '" + value + "'");
    return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw std::invalid_argument(key + ": expected true or false");
}

std::string format_grid(const std::vector<double>& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ", " : "") + format_double(values[i]);
    return out + "]";
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    for (auto [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "?";
}

ExperimentKind parse_experiment_kind(const std::string& text) {
    for (auto [k, name] : kKindNames) {
        if (text == name) return k;
    }
    throw std::invalid_argument("unknown experiment kind '" + text + "'");
}

const std::vector<double>& ExperimentConfig::third_grid() const {
    return kind == ExperimentKind::SignalStrength ? r : sigma;
}

std::vector<std::size_t> ExperimentConfig::n_values() const {
    std::vector<std::size_t> out;
    for (double ratio : n_over_p) out.push_back(static_cast<std::size_t>(std::llround(ratio * static_cast<double>(p))));
    return out;
}

void ExperimentConfig::validate() const {
    if (p == 0) throw std::invalid_argument("config: p must be positive");
    if (n_over_p.empty()) throw std::invalid_argument("config: n_over_p grid is empty");
    if (k.empty()) throw std::invalid_argument("config: k grid is empty");
    if (sigma.empty()) throw std::invalid_argument("config: sigma grid is empty");
    if (kind == ExperimentKind::SignalStrength) {
        if (r.empty()) throw std::invalid_argument("config: r grid is empty");
        if (sigma.size() != 1) throw std::invalid_argument("config: SignalStrength sweeps r; sigma must be a single value");
        for (double v : r) {
            if (!(v > 0.0)) throw std::invalid_argument("config: r values must be positive");
        }
    }
    if (replicates == 0) throw std::invalid_argument("config: replicates must be at least 1");
    for (auto n : n_values()) {
        if (n == 0) throw std::invalid_argument("config: every n = round(n_over_p * p) must be at least 1");
    }
    for (auto kk : k) {
        if (kk == 0 || kk > p) throw std::invalid_argument("config: k values must lie in [1, p]");
    }
    for (double s : sigma) {
        if (!(s >= 0.0)) throw std::invalid_argument("config: sigma values must be nonnegative");
    }
    if (k_bar > p) throw std::invalid_argument("config: k_bar exceeds p");
    if (step && !(*step > 0.0)) throw std::invalid_argument("config: step must be positive");
    if (max_iters == 0) throw std::invalid_argument("config: max_iters must be positive");
    if (!(grad_tol >= 0.0)) throw std::invalid_argument("config: grad_tol must be nonnegative");
    if (mc_samples == 0) throw std::invalid_argument("config: mc_samples must be positive");
    if (!(margin_scale > 0.0)) throw std::invalid_argument("config: margin_scale must be positive");
    if (threads == 0) throw std::invalid_argument("config: threads must be at least 1");
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty value for " + key);
        try {
            if (key == "experiment") cfg.kind = parse_experiment_kind(value);
            else if (key == "name") cfg.name = value;
            else if (key == "p") cfg.p = parse_count(key, value);
            else if (key == "n_over_p") cfg.n_over_p = parse_real_grid(key, value);
            else if (key == "k") {
                cfg.k.clear();
                for (double v : parse_real_grid(key, value)) cfg.k.push_back(parse_count(key, format_double(v)));
            }
            else if (key == "sigma") cfg.sigma = parse_real_grid(key, value);
            else if (key == "r") cfg.r = parse_real_grid(key, value);
            else if (key == "k_bar") cfg.k_bar = parse_count(key, value);
            else if (key == "nonzero_sigma") cfg.nonzero_sigma = parse_double(value);
            else if (key == "perturb_sigma") cfg.perturb_sigma = parse_double(value);
            else if (key == "replicates") cfg.replicates = parse_count(key, value);
            else if (key == "seed") cfg.seed = std::stoull(value);
            else if (key == "step") cfg.step = value == "auto" ? std::nullopt : std::optional<double>(parse_double(value));
            else if (key == "max_iters") cfg.max_iters = parse_count(key, value);
            else if (key == "grad_tol") cfg.grad_tol = parse_double(value);
            else if (key == "mc_samples") cfg.mc_samples = parse_count(key, value);
            else if (key == "margin_scale") cfg.margin_scale = parse_double(value);
            else if (key == "evaluate") {
                if (value == "iht") cfg.evaluate = EvaluatedIterate::Iht;
                else if (value == "debiased") cfg.evaluate = EvaluatedIterate::Debiased;
                else throw std::invalid_argument("evaluate must be iht or debiased");
            }
            else if (key == "overlay") cfg.overlay = value;
            else if (key == "threads") cfg.threads = parse_count(key, value);
            else if (key == "timing") cfg.timing = parse_bool(key, value);
            else throw std::invalid_argument("unknown key '" + key + "'");
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
        } catch (const std::out_of_range&) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": value out of range for " + key);
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    ExperimentConfig cfg = parse_config(buf.str());
    bool named = false;
    std::istringstream scan(buf.str());
    for (std::string line; std::getline(scan, line);) {
        if (trim(line).rfind("name", 0) == 0) named = true;
    }
    if (!named) cfg.name = path.stem().string();
    return cfg;
}

std::string format_config(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "experiment = " << to_string(c.kind) << '\n'
        << "name = " << c.name << '\n'
        << "p = " << c.p << '\n'
        << "n_over_p = " << format_grid(c.n_over_p) << '\n';
    std::vector<double> ks(c.k.begin(), c.k.end());
    out << "k = " << format_grid(ks) << '\n'
        << "sigma = " << format_grid(c.sigma) << '\n'
        << "r = " << format_grid(c.r) << '\n'
        << "k_bar = " << c.k_bar << '\n'
        << "nonzero_sigma = " << format_double(c.nonzero_sigma) << '\n'
        << "perturb_sigma = " << format_double(c.perturb_sigma) << '\n'
        << "replicates = " << c.replicates << '\n'
        << "seed = " << c.seed << '\n'
        << "step = " << (c.step ? format_double(*c.step) : "auto") << '\n'
        << "max_iters = " << c.max_iters << '\n'
        << "grad_tol = " << format_double(c.grad_tol) << '\n'
        << "mc_samples = " << c.mc_samples << '\n'
        << "margin_scale = " << format_double(c.margin_scale) << '\n'
        << "evaluate = " << (c.evaluate == EvaluatedIterate::Iht ? "iht" : "debiased") << '\n';
    if (c.overlay) out << "overlay = " << *c.overlay << '\n';
    out << "timing = " << (c.timing ? "true" : "false") << '\n';
    return out.str();
}

}  // namespace l0erm
