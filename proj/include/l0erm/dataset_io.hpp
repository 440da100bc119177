#pragma once

#include "l0erm/core.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace l0erm {

/// Shortest form that is still 17 significant digits ("%.17g").
std::string format_double(double value);

/// CSV with header `y,x0,...,x{p-1}`, one sample per line.
void write_dataset_csv(std::ostream& out, const Dataset& data);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);

Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv(const std::filesystem::path& path);

/// Parses a full string as a double; throws std::invalid_argument otherwise.
double parse_double(std::string_view text);

}  // namespace l0erm
