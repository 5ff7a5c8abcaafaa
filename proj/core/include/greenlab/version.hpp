#pragma once

namespace greenlab {

inline constexpr const char* kToolVersion = "greenlab 1.0.0";

}  // namespace greenlab
