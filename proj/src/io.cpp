#include "stokesmg/io.hpp"

#include <cstdio>
#include <stdexcept>

namespace stokesmg {

void write_solution(const std::string& path, const SolutionFile& solution) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_solution: cannot open " + path);
  out << "stokesmg-solution 1\n";
  out << "dim " << solution.dim << "\n";
  out << "n " << solution.n << "\n";
  out << "degree " << solution.degree << "\n";
  out << "basis " << solution.basis << "\n";
  out << "count " << solution.coeffs.size() << "\n";
  char buf[32];
  for (long i = 0; i < solution.coeffs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g\n", solution.coeffs[i]);
    out << buf;
  }
}

SolutionFile read_solution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_solution: cannot open " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "stokesmg-solution" || version != 1)
    throw std::runtime_error("read_solution: unrecognized file format");
  SolutionFile s;
  std::string key;
  long count = 0;
  while (in >> key) {
    if (key == "dim") in >> s.dim;
    else if (key == "n") in >> s.n;
    else if (key == "degree") in >> s.degree;
    else if (key == "basis") in >> s.basis;
    else if (key == "count") {
      in >> count;
      break;
    } else {
      throw std::runtime_error("read_solution: unknown header key " + key);
    }
  }
  s.coeffs.resize(count);
  for (long i = 0; i < count; ++i)
    if (!(in >> s.coeffs[i])) throw std::runtime_error("read_solution: truncated coefficient data");
  return s;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns,
                     const std::vector<std::pair<std::string, std::string>>& metadata)
    : out_(path), ncols_(columns.size()) {
  if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
  for (const auto& [key, value] : metadata) out_ << "# " << key << ": " << value << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != ncols_) throw std::logic_error("CsvWriter: column count mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
}

void CsvWriter::comment(const std::string& text) { out_ << "# " << text << "\n"; }

std::string CsvWriter::num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string CsvWriter::num(int v) { return std::to_string(v); }

void write_curve(const std::string& path, const std::vector<double>& x, const std::vector<double>& y) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_curve: cannot open " + path);
  char buf[72];
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", x[i], y[i]);
    out << buf;
  }
}

}  // namespace stokesmg
