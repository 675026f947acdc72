#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace objvoice::util {

std::string base64_encode(std::span<const std::uint8_t> bytes);
// Throws Error(ParseError) on characters outside the standard alphabet.
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace objvoice::util
