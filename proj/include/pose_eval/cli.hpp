#pragma once

#include <ostream>

namespace pose_eval {

/// Runs the pose-eval command line. Exit status: 0 success, 1 input error,
/// 2 configuration error, 3 internal error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pose_eval
