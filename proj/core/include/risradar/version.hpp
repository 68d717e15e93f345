#pragma once

namespace risradar {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace risradar
