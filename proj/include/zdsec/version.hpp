#pragma once

namespace zdsec {

inline constexpr const char* kVersion = "0.1.0";

}
