#pragma once

#include <iosfwd>
#include <string>

#include "lifschitz/config.hpp"

namespace lifschitz {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

inline constexpr const char* kArtifactVersion = "1.0.0";

/// Runs the configured experiment into config.out and writes manifest.json
/// last. Returns 0, 2 (invalid configuration) or 3 (numeric failure or a
/// failed check); diagnostics go to `log`.
int run(const RunConfig& config, std::ostream& log);

}  // namespace lifschitz
