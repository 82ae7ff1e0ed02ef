#pragma once

namespace dynsync {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace dynsync
