#pragma once

namespace moltunnel {

inline constexpr const char* version = "1.0.0";

}  // namespace moltunnel
