#pragma once

namespace tabmax {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace tabmax
