// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "tsel/error.hpp"

namespace tsel::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNotConverged = 2;
inline constexpr int kExitIo = 3;

int exit_code_for(ErrorCode code);

/// Entry point of the `tsel` command. Honors TSEL_THREADS.
int run(int argc, char** argv);
/// Same, with arguments after the program name.
int run(const std::vector<std::string>& args);

}  // namespace tsel::cli
