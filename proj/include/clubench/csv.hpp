#pragma once

#include <optional>
#include <string>
#include <vector>

namespace clubench::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Reads a comma-separated UTF-8 file with a header row. No quoting: the
// formats this project defines never embed commas in fields.
Table read(const std::string& path);

void write(const std::string& path, const Table& table);

// Round-trip-exact double formatting (shortest form that parses back to the
// same value). Used everywhere a numeric lands in an output file so reruns
// are byte-identical.
std::string format_double(double v);

// Parses a finite double; returns nullopt on any failure (including NaN/Inf).
std::optional<double> parse_double(const std::string& s);

std::vector<std::string> split_line(const std::string& line);

}  // namespace clubench::csv
