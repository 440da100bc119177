#include "l0erm/dataset_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace l0erm {

std::string format_double(double value) {
    char buf[64];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
    return std::string(buf, static_cast<std::size_t>(len));
}

double parse_double(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
        text.remove_suffix(1);
    }
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (!text.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || text.empty()) {
        throw std::invalid_argument("cannot parse number '" + std::string(text) + "'");
    }
    return value;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
    out << 'y';
    for (std::size_t j = 0; j < data.p(); ++j) out << ",x" << j;
    out << '\n';
    const auto& x = data.features();
    const auto& y = data.responses();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        out << format_double(y[i]);
        for (Eigen::Index j = 0; j < x.cols(); ++j) out << ',' << format_double(x(i, j));
        out << '\n';
    }
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_dataset_csv(out, data);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        fields.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

}  // namespace

Dataset read_dataset_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("dataset CSV: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_commas(line);
    if (header.size() < 2 || header[0] != "y") {
        throw std::invalid_argument("dataset CSV: header must be y,x0,...");
    }
    const std::size_t p = header.size() - 1;
    for (std::size_t j = 0; j < p; ++j) {
        if (header[j + 1] != "x" + std::to_string(j)) {
            throw std::invalid_argument("dataset CSV: unexpected column '" + std::string(header[j + 1]) + "'");
        }
    }
    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_commas(line);
        if (fields.size() != p + 1) {
            throw std::invalid_argument("dataset CSV: line " + std::to_string(rows + 2) + " has " +
                                        std::to_string(fields.size()) + " fields, expected " +
                                        std::to_string(p + 1));
        }
        for (auto f : fields) values.push_back(parse_double(f));
        ++rows;
    }
    if (rows == 0) throw std::invalid_argument("dataset CSV: no samples");
    RowMatrix x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(p));
    DenseVector y(static_cast<Eigen::Index>(rows));
    for (std::size_t i = 0; i < rows; ++i) {
        const double* row = values.data() + i * (p + 1);
        y[static_cast<Eigen::Index>(i)] = row[0];
        for (std::size_t j = 0; j < p; ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j + 1];
    }
    return Dataset(std::move(x), std::move(y));
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_dataset_csv(in);
}

}  // namespace l0erm
