#pragma once

#include <string>

namespace resonance_atlas {

/// %.17g with '.' as decimal separator regardless of locale.
std::string format_double(double x);

/// Throws std::runtime_error when the file cannot be opened.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace resonance_atlas
