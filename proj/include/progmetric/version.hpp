#pragma once

#include <string_view>

namespace progmetric {

inline constexpr std::string_view kToolName = "progmetric";
inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace progmetric
