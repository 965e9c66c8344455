#pragma once

// Command-line surface. Subcommands: train, predict, eval, verify, bench,
// synth. Exit codes: 0 success, 1 usage error, 2 data error, 3 verification
// failure.

namespace seghyp {

int run_cli(int argc, const char* const* argv);

}  // namespace seghyp
