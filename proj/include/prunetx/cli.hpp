#pragma once

namespace prunetx {

// CLI entry point (shared by the prunetx binary and the CLI tests).
// Exit codes: 0 success, 2 config error, 3 infeasible pruning request,
// 4 numeric error.
int run_cli(int argc, const char* const* argv);

}  // namespace prunetx
