#ifndef CONDGEO_CSV_HPP
#define CONDGEO_CSV_HPP

#include <string>

#include "condgeo/measures.hpp"

namespace condgeo {

/// Reads the dataset format `x1,...,xd,c1,...,ck[,w]` (UTF-8, '.' decimal
/// point). Throws DataError on malformed input.
LabeledDataset load_labeled_csv(const std::string& path);

void save_labeled_csv(const std::string& path, const LabeledDataset& data);

/// Plain numeric matrix with an optional header line, shortest round-trip
/// number formatting.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::string& header = "");

Eigen::MatrixXd read_matrix_csv(const std::string& path, bool skip_header);

}  // namespace condgeo

#endif  // CONDGEO_CSV_HPP
