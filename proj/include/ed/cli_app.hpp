#pragma once

namespace ed {

// Full command-line front end: flag parsing, preset/config resolution,
// task dispatch, CSV and manifest emission. Returns the process exit
// status: 0 success, 1 runtime failure, 2 unknown preset or bad config.
int run_cli(int argc, char** argv);

}  // namespace ed
