#include "elastomono/matrix_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "elastomono/error.hpp"

namespace elastomono {

std::string format_double(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  require(ec == std::errc{}, ErrorKind::io, "cannot format number");
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto [end, ec] = std::from_chars(first, last, value);
  require(ec == std::errc{} && end == last, ErrorKind::io, "not a number: '" + std::string(text) + "'");
  return value;
}

void write_matrix_rows(std::ostream& out, const Eigen::MatrixXd& matrix) {
  std::string line;
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    line.clear();
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (j > 0) line += ' ';
      line += format_double(matrix(i, j));
    }
    line += '\n';
    out << line;
  }
}

Eigen::MatrixXd read_matrix_rows(std::istream& in, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  std::string token;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!(in >> token)) fail(ErrorKind::io, "matrix file is truncated");
      m(i, j) = parse_double(token);
    }
  }
  return m;
}

void write_pgm(std::ostream& out, const std::vector<double>& values, int nx, int ny, double scale) {
  require(values.size() == static_cast<std::size_t>(nx) * ny, ErrorKind::incompatible_operands,
          "raster size does not match the grid");
  out << "P5\n" << nx << ' ' << ny << "\n255\n";
  std::string row(static_cast<std::size_t>(nx), '\0');
  for (int iy = ny - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const double v = values[static_cast<std::size_t>(iy) * nx + ix];
      const double t = scale > 0.0 ? std::clamp(v / scale, 0.0, 1.0) : 0.0;
      row[ix] = static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t)));
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::io, "cannot open '" + path + "' for writing");
  out << content;
  require(static_cast<bool>(out), ErrorKind::io, "failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace elastomono
