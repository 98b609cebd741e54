#pragma once

namespace fmse {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fmse
