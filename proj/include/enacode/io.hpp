#pragma once

#include <string>

namespace enacode::io {

/// Whole-file read; throws Error naming the path.
std::string read_text(const std::string& path);

/// Writes through a sibling temporary file and renames it into place.
void write_text(const std::string& path, const std::string& data);

} // namespace enacode::io
