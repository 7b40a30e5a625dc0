#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace segrad::cli {

/// Exit codes: 0 success, 1 usage/validation error, 2 data error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace segrad::cli
