#pragma once

#include <filesystem>
#include <iosfwd>

#include "btv/types.hpp"

namespace btv::mm {

/// Reads a real MatrixMarket file in coordinate or array format, with
/// general, symmetric or skew-symmetric storage.
Matrix read(std::istream& in, const std::string& source = "<stream>");
Matrix read_file(const std::filesystem::path& path);

/// Writes array format with 17 significant digits, so reading back is exact.
void write(std::ostream& out, const Matrix& m);
void write_file(const std::filesystem::path& path, const Matrix& m);

}  // namespace btv::mm
