#pragma once

namespace weakseg {
inline constexpr const char* kVersion = "1.0.0";
}
