#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace runlab {

inline constexpr const char* kVersion = "0.1.0";

/// Runs the runlab command line (args exclude the program name). Returns the
/// exit status: 0 pass, 2 verification failure, 3 emptiness branch,
/// 4 budget exceeded, 64 usage.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// SHA-256 of a byte string, lowercase hex.
std::string sha256_hex(const std::string& bytes);

}  // namespace runlab
