#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nlcp::cli {

// Process exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kIoError = 1;
inline constexpr int kBadArguments = 2;
inline constexpr int kPreconditionFailed = 3;

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name; the first element is the subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace nlcp::cli
