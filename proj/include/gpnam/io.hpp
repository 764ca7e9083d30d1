#pragma once

#include <filesystem>
#include <string>

namespace gpnam {

/// Writes `content` to a sibling temp file and renames it over `path`, so a
/// failed write never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

/// printf("%.{digits}g") without locale surprises.
std::string format_real(double value, int significant_digits);

}  // namespace gpnam
