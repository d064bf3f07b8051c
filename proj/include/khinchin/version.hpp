#pragma once

namespace khinchin {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportSchema = "khinchin-lab/1";

} // namespace khinchin
