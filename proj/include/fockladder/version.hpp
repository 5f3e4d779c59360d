// version.hpp — library version string

#pragma once

#include <string_view>

namespace fockladder {

inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace fockladder
