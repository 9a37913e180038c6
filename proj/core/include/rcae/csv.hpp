#pragma once

#include <string>
#include <vector>

#include "rcae/matrix.hpp"

namespace rcae {

/// Write a matrix as plain CSV, one row per line, 17 significant digits
/// (lossless for doubles), LF line endings.
void write_matrix_csv(const Matrix& m, const std::string& path);

/// Read a rectangular numeric CSV. Lines starting with '#' are skipped.
/// Throws std::runtime_error naming the line on ragged rows or non-numeric
/// cells.
Matrix read_matrix_csv(const std::string& path, bool skip_header = false);

/// Format a double with 17 significant digits (round-trip exact).
std::string format_double(double x);

/// Parse one CSV line into cells (separator ','). No quoting; numeric data.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace rcae
