#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mcras {

extern const char* const kVersion;

// Runs one command-line invocation; args exclude the program name.
// Exit status: 0 success, 2 usage or domain error, 1 failed certification.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace mcras
