#pragma once

namespace posegate {

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr int kRecordFormatVersion = 1;

}  // namespace posegate
