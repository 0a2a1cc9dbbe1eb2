#pragma once

namespace ma3d::tools {

/// Exit codes: 0 success, 1 solver non-convergence, 2 bad arguments.
int cli_main(int argc, char** argv);

}  // namespace ma3d::tools
