#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace elastomono {

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

// Plain-text matrix: one row per line, space separated.
void write_matrix_rows(std::ostream& out, const Eigen::MatrixXd& matrix);
Eigen::MatrixXd read_matrix_rows(std::istream& in, Eigen::Index rows, Eigen::Index cols);

// 8-bit binary graymap, row 0 of `values` printed at the bottom so that
// the image matches the (x, y) orientation of the unit square. Values are
// scaled linearly from [0, scale] to [0, 255].
void write_pgm(std::ostream& out, const std::vector<double>& values, int nx, int ny, double scale);

// Writes `content` to `path`, creating parent directories.
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace elastomono
