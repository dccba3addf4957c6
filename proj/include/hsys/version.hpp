#pragma once

#include <string_view>

namespace hsys {

inline constexpr std::string_view kVersion = "hsys 0.1.0";

}  // namespace hsys
