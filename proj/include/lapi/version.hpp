#pragma once

namespace lapi {

inline constexpr const char* kEngineVersion = "0.1.0";
inline constexpr int kTraceSchemaVersion = 1;

}  // namespace lapi
