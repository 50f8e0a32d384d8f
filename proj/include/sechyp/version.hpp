#pragma once

namespace sechyp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sechyp
