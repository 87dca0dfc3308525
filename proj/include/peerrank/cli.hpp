#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace peerrank {

// Entry point behind the `peerrank` binary. Returns 0 on success, 1 on I/O
// or transport failures, 2 on schema or argument errors.
int run(int argc, char** argv);
// Same, with the program name omitted from `args`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace peerrank
