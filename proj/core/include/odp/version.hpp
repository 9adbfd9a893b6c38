#pragma once

namespace odp {
inline constexpr const char* kVersion = "0.3.0";
}
