#pragma once

namespace ctops {
inline constexpr const char* kVersion = "1.0.0";
}
