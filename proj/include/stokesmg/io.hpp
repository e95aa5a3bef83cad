#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace stokesmg {

/// Solution coefficient file: plain-text header recording the basis
/// convention followed by one coefficient per line (element-major, per
/// element the velocity components then pressure, each in the orthonormal
/// tensor Legendre basis).
struct SolutionFile {
  int dim = 0;
  int n = 0;
  int degree = 0;
  std::string basis = "legendre-orthonormal";
  Eigen::VectorXd coeffs;
};

void write_solution(const std::string& path, const SolutionFile& solution);
SolutionFile read_solution(const std::string& path);

/// FNV-1a hash of a string, used to stamp outputs with their configuration.
std::uint64_t fnv1a(const std::string& text);

/// CSV with a metadata comment block ("# key: value") and a header row.
class CsvWriter {
public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns,
            const std::vector<std::pair<std::string, std::string>>& metadata);
  void row(const std::vector<std::string>& cells);
  void comment(const std::string& text);

  static std::string num(double v);
  static std::string num(int v);

private:
  std::ofstream out_;
  std::size_t ncols_;
};

/// Two-column "h value" plot data.
void write_curve(const std::string& path, const std::vector<double>& x, const std::vector<double>& y);

}  // namespace stokesmg
