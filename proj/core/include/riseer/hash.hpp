#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace riseer {

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view bytes);
/// Throws Error{io_error} if the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace riseer
