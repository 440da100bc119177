#include "l0erm/report_io.hpp"

#include <cmath>
#include <limits>

namespace l0erm {

namespace {

nlohmann::json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double read_number(const nlohmann::json& v) {
    if (v.is_number()) return v.get<double>();
    const auto s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw std::invalid_argument("expected a number, got '" + s + "'");
}

nlohmann::json vector_json(const DenseVector& v) {
    auto arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(number(v[i]));
    return arr;
}

DenseVector vector_from(const nlohmann::json& arr) {
    DenseVector v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = read_number(arr[i]);
    return v;
}

}  // namespace

nlohmann::json to_json(const SolveReport& report) {
    nlohmann::json doc;
    doc["objective"] = number(report.objective);
    doc["support"] = report.support.indices();
    doc["solution"] = vector_json(report.solution);
    doc["iters_run"] = report.iters_run;
    doc["converged"] = report.converged;
    doc["step_size"] = number(report.step_size);
    doc["min_margin"] = number(report.min_margin);
    if (report.debiased) doc["debiased"] = vector_json(*report.debiased);
    return doc;
}

SolveReport solve_report_from_json(const nlohmann::json& doc) {
    SolveReport r;
    r.objective = read_number(doc.at("objective"));
    r.solution = vector_from(doc.at("solution"));
    r.support = SupportSet(doc.at("support").get<std::vector<std::size_t>>(), static_cast<std::size_t>(r.solution.size()));
    r.iters_run = doc.at("iters_run").get<std::size_t>();
    r.converged = doc.at("converged").get<bool>();
    if (doc.contains("step_size")) r.step_size = read_number(doc["step_size"]);
    if (doc.contains("min_margin")) r.min_margin = read_number(doc["min_margin"]);
    if (doc.contains("debiased")) r.debiased = vector_from(doc["debiased"]);
    return r;
}

nlohmann::json to_json(const StabilityReport& report) {
    nlohmann::json doc;
    doc["support_agreement_rate"] = report.support_agreement_rate;
    doc["empirical_gamma"] = number(report.max_loss_discrepancy);
    auto margins = nlohmann::json::array();
    for (double m : report.ht_margins) margins.push_back(number(m));
    doc["ht_margins"] = margins;
    doc["n_trials"] = report.n_trials;
    return doc;
}

nlohmann::json to_json(const RiskReport& report) {
    nlohmann::json doc;
    doc["empirical_risk"] = number(report.empirical_risk);
    doc["population_risk"] = number(report.population_risk);
    doc["population_std_error"] = number(report.population_std_error);
    doc["generalization_gap"] = number(report.generalization_gap);
    if (report.excess_risk) {
        doc["excess_risk"] = number(*report.excess_risk);
        doc["excess_std_error"] = number(report.excess_std_error);
    } else {
        doc["excess_risk"] = nullptr;
    }
    return doc;
}

}  // namespace l0erm
