#pragma once

#include <string>

namespace commstab {

// Shortest decimal form that round-trips to the same double (std::to_chars).
std::string format_double(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace commstab
