#pragma once

namespace carleman {

inline constexpr const char* version = "0.1.0";

} // namespace carleman
