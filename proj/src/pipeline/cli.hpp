#pragma once

namespace framecast::pipe {

// Entry point behind main(). Returns the process exit code: 0 on success,
// 1 when a command fails, 2 for command-line usage errors.
int cli_main(int argc, char** argv);

}  // namespace framecast::pipe
