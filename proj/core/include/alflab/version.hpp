#pragma once

namespace alflab {
inline constexpr const char* kVersion = "0.1.0";
}
