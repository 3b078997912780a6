#pragma once

namespace mnexact {

inline constexpr const char* kVersion = "1.0.0";

} // namespace mnexact
