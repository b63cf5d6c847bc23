#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ifsec::cli
{

inline constexpr int exit_pass = 0;
inline constexpr int exit_violation = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_model = 3;
inline constexpr int exit_budget = 4;

// `args` excludes the program name.
int run_cli( const std::vector< std::string >& args, std::ostream& out, std::ostream& err );

} // namespace ifsec::cli
