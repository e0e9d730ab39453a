// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace detgeom::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitDomainError = 3;

/// Version string stamped into every report.
const char* tool_version();

/// Entry point shared by the executable and the tests. `args` includes the
/// program name. Subcommands: eval, propose, assign, fit, score.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace detgeom::cli
