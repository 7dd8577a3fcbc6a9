#pragma once

namespace vibron::app {

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Full command-line entry point; returns the process exit code.
int cli_main(int argc, char** argv);

}  // namespace vibron::app
