#pragma once

namespace cmf {
inline constexpr const char* kVersion = "0.1.0";
}
