// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>

namespace thinkahead::cli {

// Exit codes: 0 success, 1 usage error, 2 input or pipeline error.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace thinkahead::cli
