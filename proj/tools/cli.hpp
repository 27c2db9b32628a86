#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace netdiff::cli {

// Exit codes: 0 ok, 2 spec error, 3 refusal, 4 internal.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace netdiff::cli
