#pragma once

namespace ttc {
inline constexpr const char* version = "0.1.0";
}
