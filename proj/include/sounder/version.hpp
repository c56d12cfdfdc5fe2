#pragma once

namespace sounder {

inline constexpr const char* kToolVersion = "1.0.0";

} // namespace sounder
