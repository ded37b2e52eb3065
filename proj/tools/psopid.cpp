#include "psopid/cli.hpp"

int main(int argc, char** argv) { return psopid::cli::cli_main(argc, argv); }
