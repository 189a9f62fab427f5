#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace webkg {

std::string to_lower_ascii(std::string_view s);
std::string_view trim(std::string_view s);

// Lowercase, trim, and collapse internal whitespace runs into one space.
std::string canonicalize(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::vector<std::string> split(std::string_view s, char sep);

// 64-bit FNV-1a. The seed is folded into the offset basis so that distinct
// seeds give independent hash families; results are platform independent.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0);

std::string to_hex(std::uint64_t value);

}  // namespace webkg
