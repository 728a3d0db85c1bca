#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "adaptista/model.hpp"

namespace adaptista {

/// Shortest decimal form that round-trips to the same double. Stable across
/// runs, so CSV artifacts compare bitwise.
std::string format_double(double v);

/// Headerless CSV, one matrix row per line.
void write_matrix_csv(const Matrix& m, std::ostream& out);
void write_matrix_csv(const Matrix& m, const std::filesystem::path& path);

/// Parses headerless CSV of finite reals with a constant number of fields per
/// line. Blank lines are skipped. Throws std::runtime_error naming the
/// offending line/field.
Matrix read_matrix_csv(std::istream& in, const std::string& source = "<stream>");
Matrix read_matrix_csv(const std::filesystem::path& path);

}  // namespace adaptista
