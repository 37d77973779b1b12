#pragma once

// Matrix CSV: a header line with the row count (square matrices) or
// "rows,cols" (rectangular, e.g. n x p samples), then one line per row of
// comma-separated values printed with 17 significant digits so that every
// double round-trips exactly.

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ggm/error.hpp"
#include "ggm/model.hpp"

namespace ggm {

inline void write_matrix_csv(std::ostream& out, const Matrix& m) {
  if (m.rows() == m.cols()) {
    out << m.rows() << '\n';
  } else {
    out << m.rows() << ',' << m.cols() << '\n';
  }
  char buffer[32];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", m(r, c));
      if (c > 0) out << ',';
      out << buffer;
    }
    out << '\n';
  }
}

inline Matrix read_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::io_error, "matrix CSV is empty");
  long long rows = -1, cols = -1;
  if (std::sscanf(line.c_str(), "%lld,%lld", &rows, &cols) == 1) cols = rows;
  if (rows < 0 || cols < 0) throw Error(ErrorKind::io_error, "bad matrix CSV header: " + line);
  Matrix m(rows, cols);
  for (long long r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) throw Error(ErrorKind::io_error, "matrix CSV ended after " + std::to_string(r) + " rows");
    std::istringstream fields(line);
    std::string cell;
    long long c = 0;
    while (std::getline(fields, cell, ',')) {
      if (c >= cols) throw Error(ErrorKind::io_error, "too many columns in row " + std::to_string(r));
      try {
        std::size_t used = 0;
        m(r, c) = std::stod(cell, &used);
        if (used != cell.size() && cell.find_first_not_of(" \r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error(ErrorKind::io_error, "bad number '" + cell + "' in row " + std::to_string(r));
      }
      ++c;
    }
    if (c != cols) throw Error(ErrorKind::io_error, "row " + std::to_string(r) + " has " + std::to_string(c) + " columns");
  }
  return m;
}

inline void write_matrix_csv_file(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io_error, "cannot open " + path + " for writing");
  write_matrix_csv(out, m);
}

inline Matrix read_matrix_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path);
  return read_matrix_csv(in);
}

}  // namespace ggm
