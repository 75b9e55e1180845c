#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace l2d {

// Shortest decimal string that round-trips the exact double value.
std::string format_double(double v);

// Parse a decimal double; throws DataError on garbage.
double parse_double(std::string_view s);

// FNV-1a 64-bit content hash, rendered as 16 hex digits. Used for artifact
// lineage checks, not security.
std::string content_hash(std::string_view bytes);

// Whole-file read/write helpers; throw IoError.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace l2d
