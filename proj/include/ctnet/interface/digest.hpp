#pragma once

#include <string>
#include <string_view>

namespace ctnet {

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// SHA-256 of a file's contents. Throws DataError if it cannot be read.
std::string sha256_file(const std::string& path);

}  // namespace ctnet
