#pragma once

namespace fuvalkit::cli {

/// Exit codes: 0 success, 1 failed verification property, 2 configuration
/// error, 3 divergence.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDiverged = 3;

/// Entry point for the `fuvalkit` executable: gen, reference, fit, grid, verify.
int run(int argc, char** argv);

}  // namespace fuvalkit::cli
