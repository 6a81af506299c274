#pragma once

namespace invldm {
inline constexpr const char* kVersion = "0.1.0";
}
