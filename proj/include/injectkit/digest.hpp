#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace injectkit {

using Sha224Digest = std::array<std::uint8_t, 28>;

Sha224Digest sha224(std::span<const std::uint8_t> data);
Sha224Digest sha224(std::string_view text);
Sha224Digest sha224_file(const std::filesystem::path& path);

std::string to_hex(std::span<const std::uint8_t> bytes);

} // namespace injectkit
