#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace rdel {

inline constexpr const char* kToolVersion = "1.0.0";

/// Exit codes shared by every command.
enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitNotConverged = 2 };

/// Runs one command line (args exclude the program name). Diagnostics go to
/// err, summaries to out. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lower-case hex SHA-256 of a file's bytes. Throws InputError if unreadable.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace rdel
