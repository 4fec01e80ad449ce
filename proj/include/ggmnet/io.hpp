#pragma once

#include <nlohmann/json.hpp>

#include <Eigen/Dense>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ggmnet/types.hpp"

namespace ggmnet::io {

/// Round-trip-exact decimal rendering of a double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

/// Plain comma-separated reals, one row per line, no header.
inline Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) throw std::invalid_argument("trailing characters");
        row.push_back(v);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": parse error at line " + std::to_string(lineno) +
                                 ": bad numeric field '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error(path + ": parse error at line " + std::to_string(lineno) +
                               ": expected " + std::to_string(rows.front().size()) + " fields, got " +
                               std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": empty matrix file");
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

inline nlohmann::json edge_set_to_json(const EdgeSet& e) {
  nlohmann::json j;
  j["p"] = e.node_count();
  j["edges"] = nlohmann::json::array();
  for (auto [a, b] : e.edges()) j["edges"].push_back({a, b});
  return j;
}

inline EdgeSet edge_set_from_json(const nlohmann::json& j) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  return EdgeSet(j.at("p").get<int>(), std::move(edges));
}

inline void write_edge_set_json(const std::string& path, const EdgeSet& e) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << edge_set_to_json(e).dump(2) << '\n';
}

inline EdgeSet read_edge_set_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  nlohmann::json j;
  in >> j;
  return edge_set_from_json(j);
}

/// Returns CSV with a header row of labels and an optional leading
/// non-numeric column (dates), which is skipped.
inline Dataset read_table_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2) throw std::runtime_error(path + ": expected at least 2 columns");

  std::vector<std::vector<double>> rows;
  bool skip_first = false;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size()) {
      throw std::runtime_error(path + ": parse error at line " + std::to_string(lineno) +
                               ": expected " + std::to_string(header.size()) + " fields");
    }
    if (rows.empty()) {
      // First data row decides whether column 0 is a date/index column. The
      // whole cell must parse as a number, not just a prefix like "2020".
      try {
        std::size_t used = 0;
        (void)std::stod(cells[0], &used);
        skip_first = used != cells[0].size();
      } catch (const std::exception&) {
        skip_first = true;
      }
    }
    std::vector<double> row;
    for (std::size_t c = skip_first ? 1 : 0; c < cells.size(); ++c) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cells[c], &used);
        if (used != cells[c].size()) throw std::invalid_argument("trailing characters");
        row.push_back(v);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": parse error at line " + std::to_string(lineno) +
                                 ": bad numeric field '" + cells[c] + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw std::runtime_error(path + ": need at least 2 data rows");
  const std::size_t p = rows.front().size();
  Eigen::MatrixXd m(rows.size(), p);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < p; ++j) m(i, j) = rows[i][j];
  }
  std::vector<std::string> labels(header.begin() + (skip_first ? 1 : 0), header.end());
  return Dataset(std::move(m), std::move(labels));
}

inline void write_dataset_csv(const std::string& path, const Dataset& d, bool header = true) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  if (header && d.labels()) {
    const auto& lab = *d.labels();
    for (std::size_t j = 0; j < lab.size(); ++j) {
      if (j > 0) out << ',';
      out << lab[j];
    }
    out << '\n';
  }
  for (int i = 0; i < d.rows(); ++i) {
    for (int j = 0; j < d.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(d.values()(i, j));
    }
    out << '\n';
  }
}

}  // namespace ggmnet::io
