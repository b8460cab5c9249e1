#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace spacinglab::format {

// Shortest decimal text with at most `digits` significant digits; '.' as
// separator regardless of locale. NaN and infinities become "nan", "inf".
std::string number(double value, int digits = 12);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t value);

}  // namespace spacinglab::format
