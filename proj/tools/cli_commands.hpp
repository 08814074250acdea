#pragma once

namespace recon::cli {

/// Parse argv and dispatch to the reconstruct / metrics / synth subcommands.
/// Returns the process exit status: 0 success, 2 I/O or parse failure,
/// 3 configuration error, 4 solver failure.
int run(int argc, const char* const* argv);

}  // namespace recon::cli
