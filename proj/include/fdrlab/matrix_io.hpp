#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdrlab {

// Dense CSV, row-major, header row with column indices, 17 significant
// digits so doubles round-trip exactly. LF line endings.

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (j) out << ',';
    out << j;
  }
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_vector_csv(const std::string& path, const Eigen::VectorXd& v) {
  write_matrix_csv(path, v);
}

inline Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
  std::vector<std::vector<double>> rows;
  size_t ncol = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      size_t pos = 0;
      double v = std::stod(cell, &pos);
      row.push_back(v);
    }
    if (ncol == 0) ncol = row.size();
    if (row.size() != ncol) throw std::runtime_error("ragged csv row in " + path);
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(ncol));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < ncol; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

inline Eigen::VectorXd read_vector_csv(const std::string& path) {
  Eigen::MatrixXd m = read_matrix_csv(path);
  if (m.cols() != 1) throw std::runtime_error("expected single-column csv: " + path);
  return m.col(0);
}

}  // namespace fdrlab
