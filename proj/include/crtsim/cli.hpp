#pragma once
// Command-line front end: calibrate / simulate / conduct / sensitivity.

namespace crtsim {

// Exit codes: 0 success, 2 parse/usage failure, 3 calibration failure,
// 4 runtime failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitCalibration = 3;
inline constexpr int kExitRuntime = 4;

int run_cli(int argc, const char* const* argv);

}  // namespace crtsim
