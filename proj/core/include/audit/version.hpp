#pragma once

namespace audit {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace audit
