#pragma once

#include <iostream>
#include <ostream>

namespace ablum::cli {

// Exit codes: 0 success, 1 configuration or I/O failure, 2 usage error.
int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
             std::ostream& err = std::cerr);

}  // namespace ablum::cli
