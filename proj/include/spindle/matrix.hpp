#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace spindle {

// Row-major throughout: problem instances are row vectors and the training
// loops walk examples row by row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

// Formats with 10 significant digits ("%.10g"), the one float format used in
// every CSV this library writes, so equal doubles always produce equal bytes.
std::string format_value(double v);

// Plain numeric CSV, no header. Used for instance/target matrices and weights.
void write_matrix_csv(const std::string& path, const Matrix& m);
Matrix read_matrix_csv(const std::string& path);

// Generic row-oriented CSV with a header line. Cells are written verbatim.
void write_csv_rows(const std::string& path, const std::string& header,
                    const std::vector<std::vector<std::string>>& rows);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace spindle
