#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace headgate {

// SHA-256 hex digests (OpenSSL). Used for run manifests, cache integrity
// lines, and judge replay keys.
std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::filesystem::path& path);

}  // namespace headgate
