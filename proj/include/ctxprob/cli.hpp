#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ctxprob::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kDataError = 2;
inline constexpr int kInadmissible = 3;

// Runs one command line (args[0] is the program name). Errors are reported
// as a single "error: <kind>: <message>" line on `err`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

} // namespace ctxprob::cli
