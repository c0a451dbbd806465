#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "opsys/io.hpp"

namespace opsys::cli {

/// Exit codes: 0 success/Member/Certified, 1 negative verdict, 2 input or
/// numerical error. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Small deterministic invariant suites; the result carries "pass".
io::json run_selftest(const io::RunConfig& config);

}  // namespace opsys::cli
