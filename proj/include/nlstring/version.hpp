#ifndef NLSTRING_VERSION_HPP
#define NLSTRING_VERSION_HPP

#include <string_view>

namespace nlstring {
inline constexpr std::string_view kVersion = "0.1.0";
}

#endif  // NLSTRING_VERSION_HPP
