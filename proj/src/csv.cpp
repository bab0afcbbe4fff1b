#include "condgeo/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "condgeo/serialize.hpp"

namespace condgeo {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t start = 0;
    while (start < cell.size() && cell[start] == ' ') ++start;
    out.push_back(cell.substr(start));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_number(const std::string& cell, const std::string& context) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw Error(ErrorCode::DataError, "bad number '" + cell + "' in " + context);
  }
  return value;
}

}  // namespace

LabeledDataset load_labeled_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::DataError, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::DataError, "empty file " + path);
  }
  const std::vector<std::string> header = split_row(line);
  Eigen::Index d = 0, k = 0;
  bool has_weight = false;
  for (const auto& name : header) {
    if (!name.empty() && name[0] == 'x') {
      ++d;
    } else if (!name.empty() && name[0] == 'c') {
      ++k;
    } else if (name == "w") {
      has_weight = true;
    } else {
      throw Error(ErrorCode::DataError, "unrecognized column '" + name + "'");
    }
  }
  if (d < 1 || k < 1) {
    throw Error(ErrorCode::DataError, "header must list x and c columns");
  }

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_row(line);
    if (static_cast<Eigen::Index>(cells.size()) != d + k + (has_weight ? 1 : 0)) {
      throw Error(ErrorCode::DataError,
                  "row with " + std::to_string(cells.size()) + " cells in " + path);
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) row.push_back(parse_number(cell, path));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::EmptySupport, "no records in " + path);

  LabeledDataset data;
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  data.x.resize(n, d);
  data.c.resize(n, k);
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) data.x(i, j) = rows[i][j];
    for (Eigen::Index j = 0; j < k; ++j) data.c(i, j) = rows[i][d + j];
    if (has_weight) w[i] = rows[i][d + k];
  }
  if (has_weight) data.weights = w;
  return data;
}

void save_labeled_csv(const std::string& path, const LabeledDataset& data) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::DataError, "cannot write " + path);
  for (Eigen::Index j = 0; j < data.data_dim(); ++j) {
    out << "x" << (j + 1) << ",";
  }
  for (Eigen::Index j = 0; j < data.label_dim(); ++j) {
    out << "c" << (j + 1) << (j + 1 < data.label_dim() || data.weights ? "," : "");
  }
  if (data.weights) out << "w";
  out << "\n";
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index j = 0; j < data.data_dim(); ++j) {
      out << double_to_string(data.x(i, j)) << ",";
    }
    for (Eigen::Index j = 0; j < data.label_dim(); ++j) {
      out << double_to_string(data.c(i, j))
          << (j + 1 < data.label_dim() || data.weights ? "," : "");
    }
    if (data.weights) out << double_to_string((*data.weights)[i]);
    out << "\n";
  }
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::string& header) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::DataError, "cannot write " + path);
  if (!header.empty()) out << header << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << double_to_string(m(i, j)) << (j + 1 < m.cols() ? "," : "");
    }
    out << "\n";
  }
}

Eigen::MatrixXd read_matrix_csv(const std::string& path, bool skip_header) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::DataError, "cannot open " + path);
  std::string line;
  if (skip_header && !std::getline(in, line)) {
    throw Error(ErrorCode::DataError, "empty file " + path);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_row(line);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) row.push_back(parse_number(cell, path));
    if (!rows.empty() && rows.front().size() != row.size()) {
      throw Error(ErrorCode::DataError, "ragged rows in " + path);
    }
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace condgeo
