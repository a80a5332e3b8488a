#pragma once

namespace codenat {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace codenat
