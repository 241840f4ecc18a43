#include "ablum_cli/cli.hpp"

int main(int argc, char** argv) { return ablum::cli::cli_main(argc, argv); }
