#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace trisieve {

/// Bad input data: missing columns, non-binary outcomes, parse failures.
class DataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Observations (y, d, x, z) with column names. x and z are row-major by observation.
struct Dataset {
  Eigen::VectorXi y;
  Eigen::VectorXi d;
  Eigen::MatrixXd x;  // n x k
  Eigen::MatrixXd z;  // n x l
  std::vector<std::string> x_names;
  std::vector<std::string> z_names;

  Eigen::Index n() const { return y.size(); }
  Eigen::Index kx() const { return x.cols(); }
  Eigen::Index kz() const { return z.cols(); }

  /// Throws DataError on shape mismatch, n < 1, non-binary y or d, or
  /// non-finite covariates.
  void validate() const;

  /// True when at least one z column takes more than one value.
  bool has_varying_instrument() const;
  Eigen::VectorXd x_means() const;

  /// Rows in the given order (for permutation tests and resampling).
  Dataset subset(const std::vector<Eigen::Index>& rows) const;
};

struct CsvColumns {
  std::string y = "y";
  std::string d = "d";
  /// Empty means: every column whose name starts with 'x' (resp. 'z').
  std::vector<std::string> x;
  std::vector<std::string> z;
};

Dataset read_csv(const std::string& path, const CsvColumns& columns = {});
Dataset parse_csv(const std::string& text, const CsvColumns& columns = {});
std::string to_csv(const Dataset& data);
void write_csv(const Dataset& data, const std::string& path);

}  // namespace trisieve
