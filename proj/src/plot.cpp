#include "l0erm/sweep.hpp"

#include "l0erm/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace l0erm {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 460;
constexpr double kLeft = 80;
constexpr double kRight = 170;
constexpr double kTop = 40;
constexpr double kBottom = 60;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Roughly five ticks at 1/2/5 multiples of a power of ten.
std::vector<double> nice_ticks(double lo, double hi) {
    if (!(hi > lo)) return {lo};
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) ticks.push_back(t);
    return ticks;
}

struct Series {
    std::string label;
    std::vector<std::tuple<double, double, double>> points;  // (n, mean, std)
};

}  // namespace

void emit_plot(const std::vector<SummaryRow>& summary, PlotMetric metric, const std::vector<BoundCurve>& overlays,
               const std::filesystem::path& path, const std::string& title) {
    bool many_k = false;
    bool many_v = false;
    for (const auto& s : summary) {
        many_k |= s.k != summary.front().k;
        many_v |= s.sigma_or_r != summary.front().sigma_or_r;
    }
    const bool signal = !summary.empty() && summary.front().experiment == "SignalStrength";
    const std::string v_name = signal ? "r" : "sigma";

    std::map<std::pair<std::size_t, double>, Series> grouped;
    for (const auto& s : summary) {
        const bool use_excess = metric == PlotMetric::ExcessRisk;
        if (use_excess && s.excess_count == 0) continue;
        auto& series = grouped[{s.k, s.sigma_or_r}];
        if (series.label.empty()) {
            if (many_k && many_v) series.label = "k=" + std::to_string(s.k) + ", " + v_name + "=" + tick_label(s.sigma_or_r);
            else if (many_v) series.label = v_name + "=" + tick_label(s.sigma_or_r);
            else series.label = "k=" + std::to_string(s.k);
        }
        series.points.emplace_back(static_cast<double>(s.n), use_excess ? s.excess_mean : s.gap_mean,
                                   use_excess ? s.excess_std : s.gap_std);
    }

    double x_lo = std::numeric_limits<double>::infinity();
    double x_hi = -x_lo;
    double y_lo = x_lo;
    double y_hi = -x_lo;
    for (auto& [key, series] : grouped) {
        std::sort(series.points.begin(), series.points.end());
        for (auto [n, mean, sd] : series.points) {
            x_lo = std::min(x_lo, n);
            x_hi = std::max(x_hi, n);
            y_lo = std::min(y_lo, mean - sd);
            y_hi = std::max(y_hi, mean + sd);
        }
    }
    for (const auto& curve : overlays) {
        for (auto [n, v] : curve.points) {
            y_lo = std::min(y_lo, v);
            y_hi = std::max(y_hi, v);
        }
    }
    if (!std::isfinite(x_lo)) {
        x_lo = 0;
        x_hi = 1;
        y_lo = 0;
        y_hi = 1;
    }
    if (x_hi == x_lo) {
        x_lo -= 1;
        x_hi += 1;
    }
    y_lo = std::min(y_lo, 0.0);
    if (y_hi <= y_lo) y_hi = y_lo + 1;
    y_hi += 0.05 * (y_hi - y_lo);

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
    auto sy = [&](double y) { return kTop + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty()) {
        svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
            << xml_escape(title) << "</text>\n";
    }
    svg << "<g stroke=\"#ddd\" stroke-width=\"1\">\n";
    for (double t : nice_ticks(y_lo, y_hi)) {
        svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(sy(t)) << "\" x2=\"" << num(kLeft + plot_w) << "\" y2=\""
            << num(sy(t)) << "\"/>\n";
    }
    svg << "</g>\n";
    svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(plot_w) << "\" height=\""
        << num(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : nice_ticks(x_lo, x_hi)) {
        svg << "<text x=\"" << num(sx(t)) << "\" y=\"" << num(kTop + plot_h + 18) << "\" text-anchor=\"middle\">"
            << tick_label(t) << "</text>\n";
    }
    for (double t : nice_ticks(y_lo, y_hi)) {
        svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(sy(t) + 4) << "\" text-anchor=\"end\">"
            << tick_label(t) << "</text>\n";
    }
    svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(kHeight - 15) << "\" text-anchor=\"middle\">n</text>\n";
    svg << "<text transform=\"translate(18," << num(kTop + plot_h / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
        << (metric == PlotMetric::GeneralizationGap ? "generalization gap" : "excess risk") << "</text>\n";

    std::size_t color = 0;
    double legend_y = kTop + 10;
    for (const auto& [key, series] : grouped) {
        const char* stroke = kPalette[color++ % std::size(kPalette)];
        std::ostringstream band;
        for (auto [n, mean, sd] : series.points) band << num(sx(n)) << ',' << num(sy(mean + sd)) << ' ';
        for (auto it = series.points.rbegin(); it != series.points.rend(); ++it) {
            band << num(sx(std::get<0>(*it))) << ',' << num(sy(std::get<1>(*it) - std::get<2>(*it))) << ' ';
        }
        svg << "<polygon points=\"" << band.str() << "\" fill=\"" << stroke << "\" fill-opacity=\"0.18\" stroke=\"none\"/>\n";
        svg << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"2\" points=\"";
        for (auto [n, mean, sd] : series.points) svg << num(sx(n)) << ',' << num(sy(mean)) << ' ';
        svg << "\"/>\n";
        for (auto [n, mean, sd] : series.points) {
            svg << "<circle cx=\"" << num(sx(n)) << "\" cy=\"" << num(sy(mean)) << "\" r=\"2.5\" fill=\"" << stroke << "\"/>\n";
        }
        svg << "<line x1=\"" << num(kWidth - kRight + 12) << "\" y1=\"" << num(legend_y) << "\" x2=\""
            << num(kWidth - kRight + 36) << "\" y2=\"" << num(legend_y) << "\" stroke=\"" << stroke
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << num(kWidth - kRight + 42) << "\" y=\"" << num(legend_y + 4) << "\">"
            << xml_escape(series.label) << "</text>\n";
        legend_y += 18;
    }
    for (std::size_t i = 0; i < overlays.size(); ++i) {
        const auto& curve = overlays[i];
        const char* stroke = kPalette[i % std::size(kPalette)];
        svg << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.2\" stroke-dasharray=\"6,4\" points=\"";
        for (auto [n, v] : curve.points) svg << num(sx(n)) << ',' << num(sy(v)) << ' ';
        svg << "\"/>\n";
    }
    if (!overlays.empty()) {
        svg << "<line x1=\"" << num(kWidth - kRight + 12) << "\" y1=\"" << num(legend_y) << "\" x2=\""
            << num(kWidth - kRight + 36) << "\" y2=\"" << num(legend_y)
            << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
        svg << "<text x=\"" << num(kWidth - kRight + 42) << "\" y=\"" << num(legend_y + 4) << "\">"
            << to_string(overlays.front().kind) << " rate</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << svg.str();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace l0erm
