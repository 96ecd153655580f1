#pragma once

namespace fracbuckle {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fracbuckle
