#pragma once

#include <string_view>

namespace pose_eval {

inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace pose_eval
