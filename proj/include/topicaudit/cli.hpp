#pragma once

namespace topicaudit {

// Parses argv, runs the requested subcommand and maps exceptions to exit
// codes: 0 success, 1 usage error, 2 data error.
int cli_dispatch(int argc, const char* const* argv);

}  // namespace topicaudit
