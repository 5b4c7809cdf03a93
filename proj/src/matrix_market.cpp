#include "btv/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace btv::mm {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    return true;
  }
  return false;
}

double parse_value(const std::string& tok, const std::string& source) {
  // strtod handles "inf"/"nan" spellings that from_chars rejects on some
  // toolchains; values are range-checked by the model constructors.
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    throw ParseError(source + ": bad numeric token '" + tok + "'");
  return v;
}

}  // namespace

Matrix read(std::istream& in, const std::string& source) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError(source + ": empty file");
  std::istringstream hs(lower(header));
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%matrixmarket" || object != "matrix")
    throw ParseError(source + ": missing %%MatrixMarket matrix banner");
  if (format != "coordinate" && format != "array")
    throw ParseError(source + ": unsupported format '" + format + "'");
  if (field != "real" && field != "double" && field != "integer")
    throw ParseError(source + ": unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric" &&
      symmetry != "skew-symmetric")
    throw ParseError(source + ": unsupported symmetry '" + symmetry + "'");

  std::string line;
  if (!next_data_line(in, line)) throw ParseError(source + ": missing size line");
  std::istringstream ss(line);
  long rows = -1, cols = -1, nnz = -1;
  ss >> rows >> cols;
  if (format == "coordinate") ss >> nnz;
  if (!ss || rows < 0 || cols < 0 || (format == "coordinate" && nnz < 0))
    throw ParseError(source + ": malformed size line");
  if (symmetry != "general" && rows != cols)
    throw ParseError(source + ": symmetric storage requires a square matrix");

  Matrix m = Matrix::Zero(rows, cols);
  const bool sym = symmetry == "symmetric";
  const bool skew = symmetry == "skew-symmetric";

  if (format == "coordinate") {
    for (long e = 0; e < nnz; ++e) {
      if (!next_data_line(in, line))
        throw ParseError(source + ": expected " + std::to_string(nnz) +
                         " entries, found " + std::to_string(e));
      std::istringstream es(line);
      long i = 0, j = 0;
      std::string tok;
      es >> i >> j >> tok;
      if (!es && !es.eof()) throw ParseError(source + ": malformed entry line");
      if (tok.empty()) throw ParseError(source + ": entry without a value");
      if (i < 1 || i > rows || j < 1 || j > cols)
        throw ParseError(source + ": entry index out of range");
      const double v = parse_value(tok, source);
      m(i - 1, j - 1) = v;
      if (i != j) {
        if (sym) m(j - 1, i - 1) = v;
        if (skew) m(j - 1, i - 1) = -v;
      }
    }
  } else {
    // Column-major; symmetric variants store the lower triangle only.
    for (long j = 0; j < cols; ++j) {
      const long start = sym ? j : (skew ? j + 1 : 0);
      for (long i = start; i < rows; ++i) {
        if (!next_data_line(in, line))
          throw ParseError(source + ": array data ended early");
        std::istringstream es(line);
        std::string tok;
        es >> tok;
        const double v = parse_value(tok, source);
        m(i, j) = v;
        if (i != j) {
          if (sym) m(j, i) = v;
          if (skew) m(j, i) = -v;
        }
      }
    }
  }
  return m;
}

Matrix read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file " + path.string());
  return read(in, path.string());
}

void write(std::ostream& out, const Matrix& m) {
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << ' ' << m.cols() << '\n';
  char buf[64];
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g\n", m(i, j));
      out << buf;
    }
  }
}

void write_file(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write matrix file " + path.string());
  write(out, m);
  if (!out) throw Error("failed writing matrix file " + path.string());
}

}  // namespace btv::mm
