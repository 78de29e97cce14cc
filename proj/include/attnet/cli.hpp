#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace attnet::cli {

/// Exit codes: 0 success, 1 usage or parse error, 2 domain error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDomain = 2;

/// Entry point shared by the attnet binary and the tests. args[0] is the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace attnet::cli
