#pragma once

namespace evidential {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace evidential
